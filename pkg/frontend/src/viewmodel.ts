/**
 * Pure presentation helpers. These format and arrange server values; none of
 * them computes a score. Display rounding is 2 decimals and stays in the
 * view layer.
 */

import type { FrameworkDoc, FrameworkNode, HistogramBarDoc, TrendDoc } from "./types.js";

export interface IssueRow {
  domainId: string;
  domainName: string;
  controlId: string;
  controlName: string;
  controlIsoRef: string;
  leafId: string;
  question: string;
}

/** Flatten the framework into assessment rows: domain -> control -> issue. */
export function issueRows(framework: FrameworkDoc): IssueRow[] {
  const rows: IssueRow[] = [];

  function walk(node: FrameworkNode, domain: FrameworkNode, control: FrameworkNode | null): void {
    const children = node.children ?? [];
    if (children.length === 0) {
      rows.push({
        domainId: domain.id,
        domainName: domain.name,
        controlId: control?.id ?? domain.id,
        controlName: control?.name ?? domain.name,
        controlIsoRef: control?.iso_ref ?? "",
        leafId: node.id,
        question: node.question ?? node.name,
      });
      return;
    }
    const isControl = children.every((c) => !c.children || c.children.length === 0);
    for (const child of children) {
      walk(child, domain, isControl ? node : control);
    }
  }

  for (const domain of framework.domains) {
    walk(domain, domain, null);
  }
  return rows;
}

export function fmtScore(value: number): string {
  return value.toFixed(2);
}

export function fmtPercent(value: number): string {
  const rounded = value.toFixed(2).replace(/\.?0+$/, "");
  return `${rounded}%`;
}

/** Bar width as a CSS percentage of the scale maximum. */
export function barWidth(value: number, maxScale = 4): number {
  if (maxScale <= 0) return 0;
  return Math.max(0, Math.min(100, (value / maxScale) * 100));
}

export interface BarPairVm {
  nodeId: string;
  label: string;
  achievementText: string;
  priorityText: string;
  achievementWidth: number;
  priorityWidth: number;
  flaggedWeakest: boolean;
}

export function barPairs(
  bars: HistogramBarDoc[],
  weakestDomains: string[],
  maxScale = 4,
): BarPairVm[] {
  const weakest = new Set(weakestDomains);
  return bars.map((bar) => ({
    nodeId: bar.node_id,
    label: bar.label,
    achievementText: fmtScore(bar.achievement),
    priorityText: fmtScore(bar.priority),
    achievementWidth: barWidth(bar.achievement, maxScale),
    priorityWidth: barWidth(bar.priority, maxScale),
    flaggedWeakest: weakest.has(bar.node_id) || bar.node_id.split(".").some((p) => weakest.has(p)),
  }));
}

/** Points for an inline SVG sparkline of past experiment scores. */
export function sparklinePoints(
  trend: TrendDoc,
  width = 160,
  height = 40,
  maxScale = 4,
): string {
  const points = trend.points;
  if (points.length === 0) return "";
  if (points.length === 1) {
    const y = height - (points[0]!.overall_achievement / maxScale) * height;
    return `0,${y.toFixed(1)} ${width},${y.toFixed(1)}`;
  }
  const step = width / (points.length - 1);
  return points
    .map((p, i) => {
      const x = i * step;
      const y = height - (p.overall_achievement / maxScale) * height;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
}

export function deltaText(deltas: number[]): string {
  if (deltas.length === 0) return "";
  const last = deltas[deltas.length - 1]!;
  const sign = last >= 0 ? "+" : "";
  return `${sign}${fmtScore(last)}`;
}
