// Built by `wasm-pack build crates/web --target web --out-dir www/pkg`.
import init, { pathPoint, juliaFrame, muRaster, diskPairModulus } from "./pkg/pinchlab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function paint(canvas, rgba) {
  const ctx = canvas.getContext("2d");
  ctx.putImageData(new ImageData(new Uint8ClampedArray(rgba), canvas.width, canvas.height), 0, 0);
}

function show(target, f) {
  try {
    f();
  } catch (e) {
    target.textContent = String(e);
  }
}

function drawJulia() {
  const [re, im, t] = [num("lre"), num("lim"), num("t")];
  $("tval").textContent = t;
  show($("pathinfo"), () => {
    const p = JSON.parse(pathPoint(re, im, t));
    $("pathinfo").textContent =
      `λ = ${p.lambda[0].toFixed(6)} + ${p.lambda[1].toFixed(6)}i    c = ${p.c[0].toFixed(6)} + ${p.c[1].toFixed(6)}i`;
    const c = $("julia");
    paint(c, juliaFrame(re, im, t, c.width, c.height));
  });
}

function drawMu() {
  const t = num("mt");
  $("mtval").textContent = t;
  show($("muinfo"), () => {
    $("muinfo").textContent = "";
    const c = $("mu");
    paint(c, muRaster(num("r"), t, c.width));
  });
}

function computeModulus() {
  show($("modulus"), () => {
    const out = JSON.parse(diskPairModulus(num("x1"), num("y1"), num("r1"), num("x2"), num("y2"), num("r2"), num("res")));
    $("modulus").textContent =
      `closed form  ${out.closed_form}\ngrid         ${out.grid}\nrelative err ${out.relative_error.toExponential(3)}`;
  });
}

await init();
for (const id of ["lre", "lim", "t"]) $(id).addEventListener("input", drawJulia);
for (const id of ["r", "mt"]) $(id).addEventListener("input", drawMu);
$("go").addEventListener("click", computeModulus);
drawJulia();
drawMu();
computeModulus();
