import init, { exploreSequence, attackCoalition, auditCoalitions } from "./pkg/mignotte_wasm_demo.js";

const SVG = "http://www.w3.org/2000/svg";
const $ = (id) => document.getElementById(id);

function el(tag, attrs = {}, text) {
  const node = document.createElementNS(SVG, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function clear(svg) {
  while (svg.firstChild) svg.removeChild(svg.firstChild);
}

function call(fn, ...args) {
  try {
    return { ok: JSON.parse(fn(...args)) };
  } catch (e) {
    return { err: String(e) };
  }
}

function inputs() {
  return {
    moduli: $("moduli").value,
    threshold: Number($("threshold").value),
    secret: $("secret").value.trim(),
    mode: $("mode").value,
    ids: $("ids").value,
    size: Number($("size").value),
  };
}

function renderSequence(p) {
  const out = $("sequence");
  const svg = $("rates");
  clear(svg);
  const r = call(exploreSequence, p.moduli, p.threshold, p.mode);
  if (r.err) {
    out.innerHTML = `<p class="error">${r.err}</p>`;
    return;
  }
  const s = r.ok;
  out.innerHTML =
    `<p>Secret range: (${s.beta}, ${s.alpha}), ${s.secret_space} possible secrets. ` +
    (s.valid ? "Valid Mignotte sequence." : `<span class="error">${s.error}</span>`) +
    `</p>`;
  if (!s.rates) return;
  // Per-participant information rate against the ideal value 1.
  const w = 900, h = 180, pad = 30;
  const bw = (w - 2 * pad) / s.rates.length;
  const y = (v) => h - pad - v * (h - 2 * pad);
  svg.appendChild(el("line", { x1: pad, x2: w - pad, y1: y(1), y2: y(1), stroke: "#b00020", "stroke-dasharray": "4 3" }));
  svg.appendChild(el("text", { x: w - pad - 60, y: y(1) - 4, "font-size": 11, fill: "#b00020" }, "ideal = 1"));
  s.rates.forEach((rate, i) => {
    const x = pad + i * bw + bw * 0.2;
    svg.appendChild(el("rect", { x, y: y(rate), width: bw * 0.6, height: y(0) - y(rate), fill: "#4a78b5" }));
    svg.appendChild(el("text", { x: x + bw * 0.3, y: h - 10, "text-anchor": "middle", "font-size": 11 }, `P${i} (${s.moduli[i]})`));
    svg.appendChild(el("text", { x: x + bw * 0.3, y: y(rate) - 4, "text-anchor": "middle", "font-size": 11 }, rate.toFixed(3)));
  });
}

function renderAttack(p) {
  const out = $("attack");
  const svg = $("line");
  clear(svg);
  const r = call(attackCoalition, p.moduli, p.threshold, p.secret, p.ids, p.mode);
  if (r.err) {
    out.innerHTML = `<p class="error">${r.err}</p>`;
    return;
  }
  const a = r.ok;
  const pooled = a.coalition.map((id) => `${a.shares[id].value} mod ${a.shares[id].modulus}`).join(", ");
  out.innerHTML =
    `<p>Pooled shares ${pooled} combine to <code>S ≡ ${a.residue} (mod ${a.modulus})</code>. ` +
    `${a.count} candidate(s) remain in (${a.beta}, ${a.alpha}): ${a.entropy_bits.toFixed(3)} bits of uncertainty.` +
    (a.listed ? "" : " Too many to draw.") + `</p>`;
  if (!a.listed) return;
  // Number line over the public interval; the true secret in red.
  const w = 900, h = 120, pad = 40;
  const lo = Number(a.beta), hi = Number(a.alpha);
  const x = (v) => pad + ((v - lo) / (hi - lo)) * (w - 2 * pad);
  svg.appendChild(el("line", { x1: pad, x2: w - pad, y1: 60, y2: 60, stroke: "#999" }));
  svg.appendChild(el("text", { x: pad, y: 90, "text-anchor": "middle", "font-size": 11 }, a.beta));
  svg.appendChild(el("text", { x: w - pad, y: 90, "text-anchor": "middle", "font-size": 11 }, a.alpha));
  for (const c of a.candidates) {
    const hit = c === a.secret;
    svg.appendChild(el("circle", { cx: x(Number(c)), cy: 60, r: hit ? 6 : 4, fill: hit ? "#b00020" : "#4a78b5" }));
    if (a.candidates.length <= 20) {
      svg.appendChild(el("text", { x: x(Number(c)), y: 45, "text-anchor": "middle", "font-size": 11 }, c));
    }
  }
}

function renderAudit(p) {
  const out = $("audit");
  const svg = $("bars");
  clear(svg);
  const r = call(auditCoalitions, p.moduli, p.threshold, p.secret, p.size, p.mode);
  if (r.err) {
    out.innerHTML = `<p class="error">${r.err}</p>`;
    return;
  }
  const a = r.ok;
  out.innerHTML =
    `<p>${a.coalitions.length} coalitions of size ${a.size}: candidates min ${a.min}, ` +
    `max ${a.max}, mean ${a.mean.toFixed(2)} (out of ${a.secret_space} possible secrets).</p>`;
  // Residual entropy per coalition, lexicographic order.
  const w = 900, h = 220, pad = 30;
  const top = Math.max(1, ...a.coalitions.map((c) => c.entropy_bits));
  const bw = (w - 2 * pad) / a.coalitions.length;
  const y = (v) => h - pad - (v / top) * (h - 2 * pad);
  a.coalitions.forEach((c, i) => {
    const x = pad + i * bw;
    const rect = el("rect", { x: x + bw * 0.1, y: y(c.entropy_bits), width: bw * 0.8, height: Math.max(1, y(0) - y(c.entropy_bits)), fill: c.count === "1" ? "#b00020" : "#4a78b5" });
    rect.appendChild(el("title", {}, `{${c.ids.join(",")}}: ${c.count} candidate(s), ${c.entropy_bits.toFixed(3)} bits`));
    svg.appendChild(rect);
    if (a.coalitions.length <= 30) {
      svg.appendChild(el("text", { x: x + bw / 2, y: h - 10, "text-anchor": "middle", "font-size": 10 }, `{${c.ids.join(",")}}`));
    }
  });
  svg.appendChild(el("text", { x: 4, y: 14, "font-size": 11 }, "residual entropy (bits); red = secret recovered"));
}

function refresh() {
  const p = inputs();
  renderSequence(p);
  renderAttack(p);
  renderAudit(p);
}

await init();
for (const id of ["moduli", "threshold", "secret", "mode", "ids", "size"]) {
  $(id).addEventListener("input", refresh);
}
refresh();
