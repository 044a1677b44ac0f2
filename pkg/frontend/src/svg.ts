/**
 * Minimal dependency-free SVG line charts: one line per series with a
 * translucent +/-1 std band, fixed [0, 1] accuracy axis, legend at the right.
 */

export interface SeriesPoint {
  x: number;
  mean: number;
  std: number;
}

export interface Series {
  label: string;
  points: SeriesPoint[];
}

const WIDTH = 720;
const HEIGHT = 440;
const MARGIN = { top: 48, right: 150, bottom: 52, left: 64 };

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

function fmt(value: number): string {
  return Number(value.toFixed(2)).toString();
}

export function renderChart(title: string, xLabel: string, series: Series[]): string {
  if (series.length === 0) {
    throw new Error(`chart ${JSON.stringify(title)} has no series`);
  }
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const xSpan = xMax > xMin ? xMax - xMin : 1;
  const sx = (x: number) => MARGIN.left + ((x - xMin) / xSpan) * innerW;
  const sy = (y: number) => MARGIN.top + (1 - Math.min(Math.max(y, 0), 1)) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${title}</text>`);

  // axes and gridlines
  for (let tick = 0; tick <= 10; tick += 2) {
    const y = sy(tick / 10);
    parts.push(`<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + innerW}" y2="${y}" stroke="#e0e0e0"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end">${fmt(tick / 10)}</text>`);
  }
  const xTicks = [...new Set(xs)].sort((a, b) => a - b);
  for (const x of xTicks) {
    const px = sx(x);
    parts.push(`<line x1="${px}" y1="${MARGIN.top + innerH}" x2="${px}" y2="${MARGIN.top + innerH + 5}" stroke="#444"/>`);
    parts.push(`<text x="${px}" y="${MARGIN.top + innerH + 20}" text-anchor="middle">${x}</text>`);
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${innerW}" height="${innerH}" fill="none" stroke="#444"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${HEIGHT - 12}" text-anchor="middle">${xLabel}</text>`,
  );
  parts.push(
    `<text transform="translate(18 ${MARGIN.top + innerH / 2}) rotate(-90)" text-anchor="middle">mean accuracy</text>`,
  );

  series.forEach((s, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const pts = [...s.points].sort((a, b) => a.x - b.x);
    const upper = pts.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean + p.std))}`);
    const lower = [...pts].reverse().map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean - p.std))}`);
    parts.push(
      `<polygon class="band" fill="${color}" fill-opacity="0.15" stroke="none" ` +
      `points="${[...upper, ...lower].join(" ")}"/>`,
    );
    const line = pts.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean))}`).join(" ");
    parts.push(`<polyline class="line" fill="none" stroke="${color}" stroke-width="2" points="${line}"/>`);
    for (const p of pts) {
      parts.push(`<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.mean))}" r="3" fill="${color}"/>`);
    }
    const ly = MARGIN.top + 10 + idx * 20;
    const lx = MARGIN.left + innerW + 14;
    parts.push(`<rect x="${lx}" y="${ly - 9}" width="14" height="14" fill="${color}"/>`);
    parts.push(`<text class="legend-label" x="${lx + 20}" y="${ly + 2}">${s.label}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
