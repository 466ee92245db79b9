/**
 * Minimal SVG line-chart builder for time-series panels.
 *
 * Produces self-contained SVG text: axes, nice ticks, grid, a legend, and
 * one polyline per series. No DOM, no external renderer.
 */

export interface Series {
  values: number[];
  label: string;
  color: string;
  dash?: string; // stroke-dasharray
}

export interface PanelOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  x: number[];
  series: Series[];
  /** Extra note under the title, e.g. an axis-convention reminder. */
  note?: string;
  yMin?: number;
  yMax?: number;
}

export const PALETTE = ["#4361ee", "#e63946", "#2d6a4f", "#f4a261", "#9d4edd"];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

/** Render one labeled panel with shared x-axis series. */
export function linePanel(opts: PanelOpts): string {
  const { x, series } = opts;
  const W = 640;
  const H = 300;
  const ml = 62;
  const mr = 16;
  const mt = opts.note ? 44 : 34;
  const mb = 46;
  const pw = W - ml - mr;
  const ph = H - mt - mb;

  const xMin = Math.min(...x);
  const xMax = Math.max(...x);
  const all = series.flatMap((s) => s.values);
  let yMin = opts.yMin ?? Math.min(...all);
  let yMax = opts.yMax ?? Math.max(...all);
  if (yMax - yMin < 1e-12) {
    yMin -= 0.5;
    yMax += 0.5;
  } else {
    const pad = (yMax - yMin) * 0.05;
    if (opts.yMin === undefined) yMin -= pad;
    if (opts.yMax === undefined) yMax += pad;
  }
  const xOf = (v: number) => ml + ((v - xMin) / (xMax - xMin || 1)) * pw;
  const yOf = (v: number) => mt + ph - ((v - yMin) / (yMax - yMin)) * ph;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${ml}" y="18" font-size="12" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;
  if (opts.note) {
    s += `<text x="${ml}" y="32" font-size="8.5" fill="#888">${esc(opts.note)}</text>\n`;
  }

  const yTicks = niceTicks(yMin, yMax, 5);
  for (const v of yTicks) {
    const y = yOf(v).toFixed(1);
    s += `<line x1="${ml}" y1="${y}" x2="${ml + pw}" y2="${y}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<line x1="${ml - 3}" y1="${y}" x2="${ml}" y2="${y}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${ml - 6}" y="${(yOf(v) + 3).toFixed(1)}" text-anchor="end" font-size="8" fill="#555">${esc(fmt(v))}</text>\n`;
  }
  const xTicks = niceTicks(xMin, xMax, 8);
  for (const v of xTicks) {
    const xp = xOf(v).toFixed(1);
    s += `<line x1="${xp}" y1="${mt + ph}" x2="${xp}" y2="${mt + ph + 3}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${xp}" y="${mt + ph + 13}" text-anchor="middle" font-size="8" fill="#555">${esc(fmt(v))}</text>\n`;
  }

  for (const sr of series) {
    const pts = x
      .map((xv, i) => `${xOf(xv).toFixed(1)},${yOf(sr.values[i]).toFixed(1)}`)
      .join(" ");
    const dash = sr.dash ? ` stroke-dasharray="${sr.dash}"` : "";
    s += `<polyline fill="none" stroke="${sr.color}" stroke-width="1.2"${dash} points="${pts}"/>\n`;
  }

  s += `<line x1="${ml}" y1="${mt}" x2="${ml}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ml}" y1="${mt + ph}" x2="${ml + pw}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${ml + pw / 2}" y="${H - 6}" text-anchor="middle" font-size="10" fill="#444">${esc(opts.xLabel)}</text>\n`;
  s += `<text x="14" y="${mt + ph / 2}" text-anchor="middle" font-size="10" fill="#444" transform="rotate(-90,14,${mt + ph / 2})">${esc(opts.yLabel)}</text>\n`;

  const legendW = Math.max(...series.map((sr) => sr.label.length)) * 5.5 + 28;
  const lx = ml + pw - legendW - 4;
  s += `<rect x="${lx - 4}" y="${mt + 2}" width="${legendW + 8}" height="${series.length * 12 + 6}" rx="2" fill="white" fill-opacity="0.85"/>\n`;
  series.forEach((sr, i) => {
    const ly = mt + 10 + i * 12;
    const dash = sr.dash ? ` stroke-dasharray="${sr.dash}"` : "";
    s += `<line x1="${lx}" y1="${ly}" x2="${lx + 16}" y2="${ly}" stroke="${sr.color}" stroke-width="1.4"${dash}/>\n`;
    s += `<text x="${lx + 20}" y="${ly + 3}" font-size="8.5" fill="#444">${esc(sr.label)}</text>\n`;
  });

  s += `</svg>\n`;
  return s;
}

/**
 * Isometric 3D flight-path view.
 *
 * The trace's inertial third axis points down, so altitude is plotted as
 * -x3 (up-positive).
 */
export function pathPanel(
  title: string,
  x1: number[],
  x2: number[],
  x3: number[],
): string {
  const W = 640;
  const H = 480;
  // isometric projection with screen-up = world-up = -x3
  const cos30 = Math.cos(Math.PI / 6);
  const sin30 = Math.sin(Math.PI / 6);
  const proj = (a: number, b: number, c: number): [number, number] => [
    (a - b) * cos30,
    (a + b) * sin30 + c, // screen y and x3 both grow downward
  ];

  const pts2 = x1.map((_, i) => proj(x1[i], x2[i], x3[i]));
  const axisLen =
    Math.max(
      ...x1.map(Math.abs),
      ...x2.map(Math.abs),
      ...x3.map(Math.abs),
      1,
    ) * 0.5;
  const axes: Array<[string, [number, number], [number, number]]> = [
    ["x1", proj(0, 0, 0), proj(axisLen, 0, 0)],
    ["x2", proj(0, 0, 0), proj(0, axisLen, 0)],
    ["up (-x3)", proj(0, 0, 0), proj(0, 0, -axisLen)],
  ];

  const allPts = [...pts2, ...axes.flatMap(([, a, b]) => [a, b])];
  const uMin = Math.min(...allPts.map((p) => p[0]));
  const uMax = Math.max(...allPts.map((p) => p[0]));
  const vMin = Math.min(...allPts.map((p) => p[1]));
  const vMax = Math.max(...allPts.map((p) => p[1]));
  const m = 50;
  const scale = Math.min(
    (W - 2 * m) / (uMax - uMin || 1),
    (H - 2 * m - 30) / (vMax - vMin || 1),
  );
  const sx = (p: [number, number]) => (m + (p[0] - uMin) * scale).toFixed(1);
  const sy = (p: [number, number]) => (m + 30 + (p[1] - vMin) * scale).toFixed(1);

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${m}" y="20" font-size="12" font-weight="600" fill="#222">${esc(title)}</text>\n`;
  s += `<text x="${m}" y="34" font-size="8.5" fill="#888">isometric view; altitude plotted as -x3 (up)</text>\n`;

  for (const [label, a, b] of axes) {
    s += `<line x1="${sx(a)}" y1="${sy(a)}" x2="${sx(b)}" y2="${sy(b)}" stroke="#aaa" stroke-width="0.8" stroke-dasharray="4,3"/>\n`;
    s += `<text x="${sx(b)}" y="${sy(b)}" font-size="8.5" fill="#888">${esc(label)}</text>\n`;
  }

  const pts = pts2.map((p) => `${sx(p)},${sy(p)}`).join(" ");
  s += `<polyline fill="none" stroke="#4361ee" stroke-width="1.4" points="${pts}"/>\n`;
  const p0 = pts2[0];
  const pn = pts2[pts2.length - 1];
  s += `<circle cx="${sx(p0)}" cy="${sy(p0)}" r="3.5" fill="#2d6a4f"/>\n`;
  s += `<text x="${sx(p0)}" y="${(Number(sy(p0)) - 6).toFixed(1)}" font-size="8.5" fill="#2d6a4f">start</text>\n`;
  s += `<circle cx="${sx(pn)}" cy="${sy(pn)}" r="3.5" fill="#e63946"/>\n`;
  s += `<text x="${sx(pn)}" y="${(Number(sy(pn)) - 6).toFixed(1)}" font-size="8.5" fill="#e63946">end</text>\n`;
  s += `</svg>\n`;
  return s;
}
