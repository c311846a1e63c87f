import init, { curvature, rayleigh_race, geodesic_search } from "./pkg/rmom_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const int = (id) => Math.max(0, Math.floor(num(id)));

function show(id, v) {
  const el = $(id);
  el.className = v.error ? "err" : "";
  el.textContent = v.error ? v.error : JSON.stringify(v, null, 2);
}

// Lines on a canvas. `series` is [{ points: [[x, y], ...], color, dots }].
function plot(canvas, series, { logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const tf = (y) => (logY ? Math.log10(Math.max(y, 1e-16)) : y);
  const pts = series.flatMap((s) => s.points);
  if (pts.length === 0) return;
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => tf(p[1]));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((tf(y) - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText((logY ? "1e" : "") + y1.toPrecision(3), 2, pad + 4);
  ctx.fillText((logY ? "1e" : "") + y0.toPrecision(3), 2, h - pad);
  ctx.fillText(String(x0), pad, h - pad + 14);
  ctx.fillText(String(x1), w - pad - 20, h - pad + 14);

  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.dots) {
      for (const [x, y] of s.points) {
        ctx.beginPath();
        ctx.arc(px(x), py(y), 3, 0, 2 * Math.PI);
        ctx.fill();
      }
      continue;
    }
    ctx.beginPath();
    s.points.forEach(([x, y], i) => (i ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
    ctx.stroke();
  }
}

function runCurvature() {
  show("curv-out", JSON.parse(curvature(num("kmin"), num("kmax"), num("diam"))));
}

function runRace() {
  const v = JSON.parse(rayleigh_race(int("race-d"), BigInt(int("race-seed")), int("race-iters")));
  if (v.error) return show("race-out", v);
  const colors = { ragdsdr: "#c0392b", rgd: "#2c7fb8" };
  plot(
    $("race-plot"),
    Object.entries(v.runs).map(([name, r]) => ({
      color: colors[name],
      points: r.suboptimality.map((y, k) => [k, y]),
    })),
    { logY: true },
  );
  const summary = Object.fromEntries(
    Object.entries(v.runs).map(([name, r]) => [name, {
      iterations_to_threshold: r.iterations_to_threshold,
      final: r.suboptimality[r.suboptimality.length - 1],
    }]),
  );
  show("race-out", { threshold: v.threshold, f_star: v.f_star, ...summary, legend: "red ragdsdr, blue rgd" });
}

function runSearch() {
  const v = JSON.parse(geodesic_search(int("gs-d"), BigInt(int("gs-seed")), Math.max(1, int("gs-iters")), 201));
  if (v.error) return show("gs-out", v);
  plot($("gs-plot"), [
    { color: "#555", points: v.profile },
    { color: "#c0392b", dots: true, points: v.probes },
  ]);
  show("gs-out", { beta: v.beta, value: v.value, evals: v.evals, f_star: v.f_star });
}

await init();
$("curv-go").onclick = runCurvature;
$("race-go").onclick = runRace;
$("gs-go").onclick = runSearch;
runCurvature();
