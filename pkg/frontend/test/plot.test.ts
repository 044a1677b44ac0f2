import { mkdtempSync, readFileSync, readdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { readSummaries } from "../src/csv.js";
import { plotByRetention, plotByStrategy } from "../src/plot.js";

const FIXTURE = join(__dirname, "fixtures", "results.csv");
const AGG_FIXTURE = join(__dirname, "fixtures", "aggregate.csv");

const STRATEGIES = ["ema", "emma", "lb", "mma", "ub"];
const LEVELS = ["R1", "R2", "R3"];

function freshDir(): string {
  return mkdtempSync(join(tmpdir(), "alsim-plots-"));
}

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("readSummaries", () => {
  it("groups raw results into one cell per (strategy, retention, budget)", () => {
    const cells = readSummaries(readFileSync(FIXTURE, "utf-8"));
    expect(cells.length).toBe(5 * 3 * 3);
    for (const cell of cells) {
      expect(cell.n).toBe(2);
      expect(cell.meanAccuracy).toBeGreaterThanOrEqual(0);
      expect(cell.meanAccuracy).toBeLessThanOrEqual(1);
      expect(cell.stdAccuracy).toBeGreaterThanOrEqual(0);
    }
  });

  it("matches the simulator's own aggregation", () => {
    const fromRaw = readSummaries(readFileSync(FIXTURE, "utf-8"));
    const fromAgg = readSummaries(readFileSync(AGG_FIXTURE, "utf-8"));
    expect(fromRaw.length).toBe(fromAgg.length);
    for (let i = 0; i < fromRaw.length; i++) {
      expect(fromRaw[i].strategy).toBe(fromAgg[i].strategy);
      expect(fromRaw[i].retention).toBe(fromAgg[i].retention);
      expect(fromRaw[i].budget).toBe(fromAgg[i].budget);
      expect(fromRaw[i].meanAccuracy).toBeCloseTo(fromAgg[i].meanAccuracy, 12);
      expect(fromRaw[i].stdAccuracy).toBeCloseTo(fromAgg[i].stdAccuracy, 12);
    }
  });

  it("rejects unknown headers", () => {
    expect(() => readSummaries("a,b,c\n1,2,3\n")).toThrow(/unrecognized header/);
  });

  it("rejects empty input", () => {
    expect(() => readSummaries("")).toThrow(/empty CSV/);
  });

  it("names the line of a malformed row", () => {
    const text = readFileSync(FIXTURE, "utf-8");
    const lines = text.split("\n");
    lines[3] = lines[3].replace(/^([^,]*,[^,]*,[^,]*,)[^,]*/, "$1oops");
    expect(() => readSummaries(lines.join("\n"))).toThrow(/line 4/);
  });
});

describe("plotByRetention", () => {
  it("writes one chart per strategy with one line per retention level", () => {
    const cells = readSummaries(readFileSync(FIXTURE, "utf-8"));
    const dir = freshDir();
    const figures = plotByRetention(cells, dir);
    expect(figures.map((f) => f.path.split("/").pop())).toEqual(
      STRATEGIES.map((s) => `by-retention_${s}.svg`),
    );
    for (const figure of figures) {
      expect(figure.seriesCount).toBe(LEVELS.length);
      const svg = readFileSync(figure.path, "utf-8");
      expect(count(svg, '<polyline class="line"')).toBe(LEVELS.length);
      expect(count(svg, '<polygon class="band"')).toBe(LEVELS.length);
      for (const level of LEVELS) {
        expect(svg).toContain(`<text class="legend-label"`);
        expect(svg).toContain(`>${level}</text>`);
      }
    }
  });
});

describe("plotByStrategy", () => {
  it("writes one chart per retention level with one line per strategy", () => {
    const cells = readSummaries(readFileSync(FIXTURE, "utf-8"));
    const dir = freshDir();
    const figures = plotByStrategy(cells, dir);
    expect(figures.map((f) => f.path.split("/").pop())).toEqual(
      LEVELS.map((l) => `by-strategy_${l}.svg`),
    );
    for (const figure of figures) {
      expect(figure.seriesCount).toBe(STRATEGIES.length);
      const svg = readFileSync(figure.path, "utf-8");
      expect(count(svg, '<polyline class="line"')).toBe(STRATEGIES.length);
      for (const strategy of STRATEGIES) {
        expect(svg).toContain(`>${strategy}</text>`);
      }
    }
  });

  it("is deterministic: identical bytes across runs", () => {
    const cells = readSummaries(readFileSync(FIXTURE, "utf-8"));
    const a = freshDir();
    const b = freshDir();
    plotByStrategy(cells, a);
    plotByStrategy(cells, b);
    for (const name of readdirSync(a)) {
      expect(readFileSync(join(a, name), "utf-8")).toBe(readFileSync(join(b, name), "utf-8"));
    }
  });

  it("works from the aggregate CSV too", () => {
    const cells = readSummaries(readFileSync(AGG_FIXTURE, "utf-8"));
    const dir = freshDir();
    const figures = plotByStrategy(cells, dir);
    expect(figures.length).toBe(LEVELS.length);
  });

  it("single-cell input renders a single-point line without crashing", () => {
    const cells = readSummaries(readFileSync(AGG_FIXTURE, "utf-8")).slice(0, 1);
    const figures = plotByStrategy(cells, freshDir());
    expect(figures.length).toBe(1);
    expect(figures[0].seriesCount).toBe(1);
  });

  it("rejects empty cell lists", () => {
    expect(() => plotByStrategy([], freshDir())).toThrow(/no data rows/);
  });
});

describe("rendered ordering sanity", () => {
  it("renders ub above lb exactly where the aggregates say so", () => {
    // The chart must be faithful to the CSV: wherever the aggregate puts ub
    // at or above lb, the rendered ub line sits at or above lb (smaller
    // SVG y), and vice versa.
    const cells = readSummaries(readFileSync(AGG_FIXTURE, "utf-8"));
    const dir = freshDir();
    plotByStrategy(cells, dir);
    const by = (s: string, r: string, b: number) =>
      cells.find((c) => c.strategy === s && c.retention === r && c.budget === b)!;
    for (const level of LEVELS) {
      const svg = readFileSync(join(dir, `by-strategy_${level}.svg`), "utf-8");
      const lines = [...svg.matchAll(/<polyline class="line"[^>]*points="([^"]+)"/g)].map((m) =>
        m[1].split(" ").map((pt) => pt.split(",").map(Number)),
      );
      expect(lines.length).toBe(STRATEGIES.length);
      const lbLine = lines[STRATEGIES.indexOf("lb")];
      const ubLine = lines[STRATEGIES.indexOf("ub")];
      [5, 10, 20].forEach((budget, i) => {
        const csvSaysAbove = by("ub", level, budget).meanAccuracy >= by("lb", level, budget).meanAccuracy;
        const renderedAbove = ubLine[i][1] <= lbLine[i][1]; // SVG y grows downward
        expect(renderedAbove).toBe(csvSaysAbove);
      });
    }
  });
});
