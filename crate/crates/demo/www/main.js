// Built by `wasm-bindgen --target web --out-dir www/pkg`; see the README.
import init, { Demo } from "./pkg/pf_demo.js";

const $ = (id) => document.getElementById(id);
const status = (msg) => { $("status").textContent = msg; };
let demo = null;

function draw(canvasId, img, caption) {
  const c = $(canvasId);
  c.width = img.width;
  c.height = img.height;
  const data = new ImageData(new Uint8ClampedArray(img.rgba()), img.width, img.height);
  c.getContext("2d").putImageData(data, 0, 0);
  $(canvasId + "-cap").textContent = caption;
  img.free();
}

// Lets the status line repaint before a long synchronous call.
const later = (f) => new Promise((ok) => setTimeout(() => ok(f()), 20));

async function run(label, f) {
  if (!demo) return status("load an image first");
  status(label + "...");
  try {
    await later(f);
  } catch (e) {
    status("error: " + (e.message || e));
  }
}

function scramble() {
  const img = demo.scramble(+$("piece").value, $("rotate").checked, +$("seed").value);
  draw("left", img, "scrambled");
  status(`${demo.piece_count()} pieces`);
}

function useDemo(d) {
  if (demo) demo.free();
  demo = d;
  draw("left", demo.source(), "source");
  $("right").width = 0;
  $("right-cap").textContent = "";
  status("image loaded");
}

$("synthetic").onclick = () => useDemo(Demo.synthetic(384, 256, +$("seed").value));

$("file").onchange = async (ev) => {
  const file = ev.target.files[0];
  if (!file) return;
  const bmp = await createImageBitmap(file);
  const c = new OffscreenCanvas(bmp.width, bmp.height);
  const ctx = c.getContext("2d");
  ctx.drawImage(bmp, 0, 0);
  const px = ctx.getImageData(0, 0, bmp.width, bmp.height);
  useDemo(new Demo(new Uint8Array(px.data.buffer), bmp.width, bmp.height));
};

$("scramble").onclick = () => run("scrambling", scramble);

$("solve").onclick = () => run("solving", () => {
  const t0 = performance.now();
  const s = demo.solve($("measure").value, +$("erosion").value, +$("seed").value, $("unknown").checked);
  const secs = ((performance.now() - t0) / 1000).toFixed(1);
  draw("right", s.image(), "solved");
  status(`accuracy ${(100 * s.accuracy).toFixed(1)}%  fitness ${s.fitness.toFixed(2)}  ` +
    `generations ${s.generations}  ${secs}s`);
  s.free();
});

$("erode").onclick = () => run("eroding", () => {
  draw("right", demo.erosion_preview(+$("erosion").value), `erosion ${$("erosion").value}px`);
  status("erosion preview");
});

$("map").onclick = () => run("scoring", () => {
  draw("right", demo.score_map($("measure").value, "right", "left"), "right/left scores, true order");
  status("bright cells just right of the diagonal are true neighbors");
});

await init();
useDemo(Demo.synthetic(384, 256, 1));
scramble();
