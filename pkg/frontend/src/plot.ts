/**
 * Chart assembly: accuracy vs budget, either one chart per strategy with a
 * line per retention level, or one chart per retention level with a line per
 * strategy.  Data comes exclusively from the CSV; nothing is simulated here.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { CellSummary } from "./csv.js";
import { Series, renderChart } from "./svg.js";

export type FigureKind = "by-retention" | "by-strategy";

function distinct(values: string[]): string[] {
  return [...new Set(values)].sort((a, b) => a.localeCompare(b));
}

function seriesFor(
  cells: CellSummary[],
  groupOf: (c: CellSummary) => string,
): Series[] {
  const labels = distinct(cells.map(groupOf));
  return labels.map((label) => ({
    label,
    points: cells
      .filter((c) => groupOf(c) === label)
      .map((c) => ({ x: c.budget, mean: c.meanAccuracy, std: c.stdAccuracy }))
      .sort((a, b) => a.x - b.x),
  }));
}

export interface WrittenFigure {
  path: string;
  seriesCount: number;
}

export function plotByRetention(cells: CellSummary[], outDir: string): WrittenFigure[] {
  if (cells.length === 0) throw new Error("no data rows to plot");
  mkdirSync(outDir, { recursive: true });
  return distinct(cells.map((c) => c.strategy)).map((strategy) => {
    const subset = cells.filter((c) => c.strategy === strategy);
    const series = seriesFor(subset, (c) => c.retention);
    const svg = renderChart(`${strategy}: accuracy vs budget`, "query budget", series);
    const path = join(outDir, `by-retention_${strategy}.svg`);
    writeFileSync(path, svg, "utf-8");
    return { path, seriesCount: series.length };
  });
}

export function plotByStrategy(cells: CellSummary[], outDir: string): WrittenFigure[] {
  if (cells.length === 0) throw new Error("no data rows to plot");
  mkdirSync(outDir, { recursive: true });
  return distinct(cells.map((c) => c.retention)).map((retention) => {
    const subset = cells.filter((c) => c.retention === retention);
    const series = seriesFor(subset, (c) => c.strategy);
    const svg = renderChart(`${retention}: strategy comparison`, "query budget", series);
    const path = join(outDir, `by-strategy_${retention}.svg`);
    writeFileSync(path, svg, "utf-8");
    return { path, seriesCount: series.length };
  });
}

export function plot(cells: CellSummary[], kind: FigureKind, outDir: string): WrittenFigure[] {
  return kind === "by-retention" ? plotByRetention(cells, outDir) : plotByStrategy(cells, outDir);
}
