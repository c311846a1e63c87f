/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const curvature: (a: number, b: number, c: number) => [number, number];
export const geodesic_search: (a: number, b: bigint, c: number, d: number) => [number, number];
export const rayleigh_race: (a: number, b: bigint, c: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
