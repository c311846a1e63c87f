/* tslint:disable */
/* eslint-disable */

/**
 * ζ, δ, the discrepancy and the acceleration horizon for the given
 * curvature range and diameter. An infinite horizon is reported as null.
 */
export function curvature(k_min: number, k_max: number, diameter: number): string;

/**
 * `f` along the geodesic from a random `v` to the start point `x` of a
 * Rayleigh instance, with the points golden-section search evaluated.
 */
export function geodesic_search(d: number, seed: bigint, gs_iters: number, samples: number): string;

/**
 * Suboptimality per iteration of RAGDsDR and plain gradient descent on the
 * same random Rayleigh instance.
 */
export function rayleigh_race(d: number, seed: bigint, iters: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly curvature: (a: number, b: number, c: number) => [number, number];
    readonly geodesic_search: (a: number, b: bigint, c: number, d: number) => [number, number];
    readonly rayleigh_race: (a: number, b: bigint, c: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
