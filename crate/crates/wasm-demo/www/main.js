import init, { Demo, polynomial_locus, preset_names } from "./pkg/tropsand_wasm.js";

const COLORS = [[0, 0, 0], [221, 51, 51], [255, 153, 0], [255, 255, 255]];
const $ = (id) => document.getElementById(id);

let demo = null;
let cell = 1;

function drawPile() {
  const cv = $("pile"), ctx = cv.getContext("2d");
  const cols = demo.cols(), rows = demo.rows();
  cell = Math.max(1, Math.floor(600 / Math.max(cols, rows)));
  cv.width = cols * cell;
  cv.height = rows * cell;
  const img = ctx.createImageData(cols, rows);
  const h = demo.heights();
  for (let i = 0; i < h.length; i++) {
    const c = h[i] === 255 ? [235, 235, 235] : COLORS[Math.min(h[i], 3)];
    img.data.set([c[0], c[1], c[2], 255], 4 * i);
  }
  // draw at one pixel per site, then scale up without smoothing
  const off = new OffscreenCanvas(cols, rows);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, cv.width, cv.height);
}

function toCanvas(x, y) {
  const [x0, y1] = demo.origin();
  const n = demo.scale();
  return [(x * n - x0 + 0.5) * cell, (y1 - y * n + 0.5) * cell];
}

function relax(point) {
  const preset = $("preset").value, n = Number($("scale").value);
  $("status").textContent = "relaxing…";
  $("poly").textContent = "";
  setTimeout(() => {
    try {
      const t = performance.now();
      if (demo) demo.free();
      demo = new Demo(preset, n, point ? point[0] : NaN, point ? point[1] : NaN);
      drawPile();
      $("status").textContent = `${demo.topplings()} topplings in ${(performance.now() - t).toFixed(0)} ms`;
    } catch (e) {
      $("status").textContent = String(e);
    }
  }, 10);
}

function overlay() {
  if (!demo) return;
  try {
    const segs = demo.fit(), weights = demo.weights();
    const ctx = $("pile").getContext("2d");
    ctx.strokeStyle = "#1565c0";
    ctx.fillStyle = "#1565c0";
    ctx.font = "bold 14px sans-serif";
    for (let i = 0; i < weights.length; i++) {
      const [ax, ay] = toCanvas(segs[4 * i], segs[4 * i + 1]);
      const [bx, by] = toCanvas(segs[4 * i + 2], segs[4 * i + 3]);
      ctx.lineWidth = 1.5 * weights[i];
      ctx.beginPath();
      ctx.moveTo(ax, ay);
      ctx.lineTo(bx, by);
      ctx.stroke();
      if (weights[i] > 1) ctx.fillText(String(weights[i]), (ax + bx) / 2 + 4, (ay + by) / 2 - 4);
    }
    $("poly").textContent = demo.polynomial();
  } catch (e) {
    $("status").textContent = String(e);
  }
}

function drawLocus() {
  const cv = $("locus"), ctx = cv.getContext("2d");
  const span = 6, scale = cv.width / span;
  const px = (x) => (x + span / 2) * scale, py = (y) => (span / 2 - y) * scale;
  ctx.clearRect(0, 0, cv.width, cv.height);
  ctx.strokeStyle = "#ddd";
  ctx.lineWidth = 1;
  for (let k = -3; k <= 3; k++) {
    ctx.beginPath(); ctx.moveTo(px(k), 0); ctx.lineTo(px(k), cv.height); ctx.stroke();
    ctx.beginPath(); ctx.moveTo(0, py(k)); ctx.lineTo(cv.width, py(k)); ctx.stroke();
  }
  try {
    const s = polynomial_locus($("terms").value, 2 * span);
    ctx.strokeStyle = "#c62828";
    ctx.fillStyle = "#c62828";
    ctx.font = "bold 13px sans-serif";
    for (let i = 0; i < s.length; i += 5) {
      const w = s[i + 4];
      ctx.lineWidth = 1.5 * w;
      ctx.beginPath(); ctx.moveTo(px(s[i]), py(s[i + 1])); ctx.lineTo(px(s[i + 2]), py(s[i + 3])); ctx.stroke();
      if (w > 1) ctx.fillText(String(w), (px(s[i]) + px(s[i + 2])) / 2 + 4, (py(s[i + 1]) + py(s[i + 3])) / 2 - 4);
    }
    $("locus-status").textContent = `${s.length / 5} edges`;
  } catch (e) {
    $("locus-status").textContent = String(e);
  }
}

await init();
for (const name of preset_names()) $("preset").add(new Option(name, name));
$("relax").onclick = () => relax(null);
$("fit").onclick = overlay;
$("draw").onclick = drawLocus;
$("pile").onclick = (ev) => {
  if (!demo) return;
  const r = ev.target.getBoundingClientRect();
  const [x0, y1] = demo.origin();
  const n = demo.scale();
  const col = (ev.clientX - r.left) / cell - 0.5, row = (ev.clientY - r.top) / cell - 0.5;
  relax([(x0 + col) / n, (y1 - row) / n]);
};
relax(null);
drawLocus();
