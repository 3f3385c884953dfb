import init, { trap_report, cross_section, line_cut } from "./pkg/surftrap_web.js";

const $ = (id) => document.getElementById(id);

const defaults = { wire: 0.33, dot: 141 };

function params() {
  return JSON.stringify({
    atom: $("atom").value,
    mirror: $("mirror").value,
    layout: $("layout").value,
    charge: Number($("charge").value),
  });
}

function fmt(v, digits = 4) {
  return v === null || v === undefined ? "-" : Number(v).toPrecision(digits);
}

function showReport(r) {
  const rows = [
    ["depth", fmt(r.depth_neV), "neV"],
    ["distance", fmt(r.distance_um), "µm"],
    ["ν_n / ν_t", `${fmt(r.nu_n_kHz)} / ${fmt(r.nu_t_kHz)}`, "kHz"],
    ["σ_n / σ_t", `${fmt(r.sigma_n_um)} / ${fmt(r.sigma_t_um)}`, "µm"],
    ["scattering", fmt(r.scattering_kHz), "kHz"],
    ["log10 lifetime", fmt(r.log10_lifetime_s), "log10 s"],
  ];
  $("report").innerHTML = rows.map((r) => `<tr><td>${r[0]}</td><td>${r[1]}</td><td>${r[2]}</td></tr>`).join("");
}

// blue at the minimum, white at zero, red for the barrier
function colour(v, lo) {
  if (v === null) return [80, 80, 80];
  if (v < 0) {
    const s = Math.min(1, v / lo);
    return [255 * (1 - s), 255 * (1 - s), 255];
  }
  const s = Math.min(1, v / -lo);
  return [255, 255 * (1 - s), 255 * (1 - s)];
}

function drawPlane(p) {
  const c = $("plane");
  const ctx = c.getContext("2d");
  const img = ctx.createImageData(p.columns, p.rows);
  for (let row = 0; row < p.rows; row++) {
    for (let col = 0; col < p.columns; col++) {
      // rows run upward in n; the canvas runs downward
      const [r, g, b] = colour(p.values[row * p.columns + col], p.min_neV);
      const k = ((p.rows - 1 - row) * p.columns + col) * 4;
      img.data.set([r, g, b, 255], k);
    }
  }
  const tmp = document.createElement("canvas");
  tmp.width = p.columns;
  tmp.height = p.rows;
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, c.width, c.height);
  ctx.fillStyle = "#000";
  ctx.fillText(`t ${fmt(p.t_range_um[0], 3)} .. ${fmt(p.t_range_um[1], 3)} µm`, 6, c.height - 6);
  ctx.fillText(`n up to ${fmt(p.n_range_um[1], 3)} µm`, 6, 14);
}

function drawCut(cut) {
  const c = $("cut");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const lo = cut.min_neV * 1.1;
  const hi = -cut.min_neV;
  const n0 = cut.n_um[0];
  const n1 = cut.n_um[cut.n_um.length - 1];
  const x = (n) => ((n - n0) / (n1 - n0)) * c.width;
  const y = (u) => c.height * (1 - (Math.min(hi, u) - lo) / (hi - lo));
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(0, y(0));
  ctx.lineTo(c.width, y(0));
  ctx.stroke();
  ctx.strokeStyle = "#036";
  ctx.beginPath();
  let started = false;
  cut.n_um.forEach((n, i) => {
    const u = cut.u_neV[i];
    if (u === null) return;
    if (started) ctx.lineTo(x(n), y(u));
    else ctx.moveTo(x(n), y(u));
    started = true;
  });
  ctx.stroke();
  ctx.fillStyle = "#000";
  ctx.fillText(`U(n), n ${fmt(n0, 3)} .. ${fmt(n1, 3)} µm`, 6, 14);
}

function update() {
  const p = params();
  const size = Number($("size").value);
  try {
    showReport(JSON.parse(trap_report(p)));
    drawPlane(JSON.parse(cross_section(p, size, 120)));
    drawCut(JSON.parse(line_cut(p, size, 300)));
    $("error").textContent = "";
  } catch (e) {
    $("report").innerHTML = "";
    $("error").textContent = String(e);
  }
}

await init();
$("layout").addEventListener("change", () => {
  $("charge").value = defaults[$("layout").value];
  update();
});
for (const id of ["atom", "mirror", "charge", "size"]) $(id).addEventListener("input", update);
update();
