import init, { mode_shapes, resonance_sweep, moving_load } from "./pkg/beamlab_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function beam() {
  const out = {};
  for (const input of document.querySelectorAll("#beam input")) {
    out[input.name] = Number(input.value);
  }
  return out;
}

function plot(canvas, xs, series, xlabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const all = series.flatMap((s) => s.y);
  let lo = Math.min(0, ...all);
  let hi = Math.max(0, ...all);
  if (hi === lo) hi = lo + 1;
  const x0 = xs[0];
  const x1 = xs[xs.length - 1];
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - lo) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, py(0));
  ctx.lineTo(w - pad, py(0));
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText(x0.toPrecision(3), pad, h - 10);
  ctx.fillText(`${x1.toPrecision(3)} ${xlabel}`, w - pad - 60, h - 10);
  ctx.fillText(hi.toExponential(2), 2, pad - 5);
  ctx.fillText(lo.toExponential(2), 2, h - pad + 15);

  series.forEach((s, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    s.y.forEach((y, j) => (j ? ctx.lineTo(px(xs[j]), py(y)) : ctx.moveTo(px(xs[j]), py(y))));
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(s.label, w - pad - 150, pad + 14 * i);
  });
}

function run(outId, fn) {
  const out = $(outId);
  out.classList.remove("err");
  out.textContent = "working...";
  setTimeout(() => {
    try {
      fn(out);
    } catch (e) {
      out.classList.add("err");
      out.textContent = String(e);
    }
  }, 0);
}

function runModes() {
  run("m-out", (out) => {
    const req = {
      beam: beam(),
      left: $("m-left").value,
      right: $("m-right").value,
      k: num("m-k"),
      count: num("m-count"),
      nodes: 201,
    };
    const res = JSON.parse(mode_shapes(JSON.stringify(req)));
    out.textContent = res.modes
      .map((m, i) => `mode ${i + 1}: f = ${m.f_hz.toFixed(4)} Hz, beta L = ${m.beta_l.toFixed(6)}`)
      .join("\n");
    plot(
      $("m-plot"),
      res.x,
      res.modes.map((m, i) => ({ label: `mode ${i + 1}`, y: m.w })),
      "x (m)",
    );
  });
}

function runSweep() {
  run("s-out", (out) => {
    const req = {
      beam: beam(),
      p0: num("s-p0"),
      f_min: num("s-fmin"),
      f_max: num("s-fmax"),
      count: num("s-count"),
      zeta1: num("s-zeta"),
      nodes: 41,
    };
    const res = JSON.parse(resonance_sweep(JSON.stringify(req)));
    const i = res.amplitude.indexOf(Math.max(...res.amplitude));
    out.textContent =
      `peak ${res.amplitude[i].toExponential(4)} m at ${res.f_hz[i].toFixed(3)} Hz; ` +
      `analytic f1 = ${res.analytic_f1_hz.toFixed(4)} Hz`;
    plot($("s-plot"), res.f_hz, [{ label: "midspan amplitude", y: res.amplitude }], "Hz");
  });
}

function runMoving() {
  run("v-out", (out) => {
    const req = {
      beam: beam(),
      p: num("v-p"),
      v: num("v-v"),
      zeta1: num("v-zeta"),
      nodes: 101,
      dt: num("v-dt"),
    };
    const res = JSON.parse(moving_load(JSON.stringify(req)));
    const daf = res.peak_dynamic / res.peak_quasi_static;
    out.textContent =
      `peak dynamic ${res.peak_dynamic.toExponential(4)} m, quasi-static ` +
      `${res.peak_quasi_static.toExponential(4)} m, ratio ${daf.toFixed(4)}`;
    plot(
      $("v-plot"),
      res.t,
      [
        { label: "dynamic", y: res.dynamic },
        { label: "quasi-static", y: res.quasi_static },
      ],
      "s",
    );
  });
}

await init();
$("m-run").addEventListener("click", runModes);
$("s-run").addEventListener("click", runSweep);
$("v-run").addEventListener("click", runMoving);
runModes();
