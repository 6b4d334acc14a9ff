/** Console view state. The console does no economic computation: series
 * arrays are restructured verbatim from the series endpoint payload, and
 * charts re-render from that payload after every step (server is the
 * source of truth). */

import type {
  ActionPayload,
  FramePayload,
  Intervention,
  SessionSummary,
} from "./types";

export const INDICATOR_KEYS = [
  "gdp_growth",
  "inflation",
  "unemployment",
  "trade_balance",
  "economic_resistance",
] as const;

export type IndicatorKey = (typeof INDICATOR_KEYS)[number];

export const INDICATOR_LABELS: Record<IndicatorKey, string> = {
  gdp_growth: "GDP growth",
  inflation: "Inflation",
  unemployment: "Unemployment",
  trade_balance: "Trade balance",
  economic_resistance: "Economic resistance",
};

/** Six aligned arrays: the five numeric indicators plus agent actions. */
export interface IndicatorSeries {
  steps: number[];
  gdp_growth: number[];
  inflation: number[];
  unemployment: number[];
  trade_balance: number[];
  economic_resistance: number[];
  actions: ActionPayload[][];
}

export function emptySeries(): IndicatorSeries {
  return {
    steps: [],
    gdp_growth: [],
    inflation: [],
    unemployment: [],
    trade_balance: [],
    economic_resistance: [],
    actions: [],
  };
}

/** Verbatim restructuring of the frames payload into aligned columns. */
export function seriesFromFrames(frames: FramePayload[]): IndicatorSeries {
  const series = emptySeries();
  for (const frame of frames) {
    series.steps.push(frame.step);
    series.gdp_growth.push(frame.gdp_growth);
    series.inflation.push(frame.inflation);
    series.unemployment.push(frame.unemployment);
    series.trade_balance.push(frame.trade_balance);
    series.economic_resistance.push(frame.economic_resistance);
    series.actions.push(frame.actions);
  }
  assertAligned(series);
  return series;
}

export function assertAligned(series: IndicatorSeries): void {
  const n = series.steps.length;
  for (const key of INDICATOR_KEYS) {
    if (series[key].length !== n) {
      throw new Error(`series ${key} length ${series[key].length} != ${n}`);
    }
  }
  if (series.actions.length !== n) {
    throw new Error(`series actions length ${series.actions.length} != ${n}`);
  }
}

const BRANCH_COLORS = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed"];

export interface BranchView {
  session: SessionSummary;
  series: IndicatorSeries;
  pending: Intervention[];
  inFlight: boolean;
  label: string;
  color: string;
}

export class ConsoleState {
  branches: BranchView[] = [];
  activeIndex = 0;
  error: string | null = null;

  get active(): BranchView | null {
    return this.branches[this.activeIndex] ?? null;
  }

  addBranch(session: SessionSummary, series: IndicatorSeries): BranchView {
    const label =
      session.parent === null
        ? (session.scenario ?? "session")
        : `fork@${session.parent.at_step}`;
    const branch: BranchView = {
      session,
      series,
      pending: [],
      inFlight: false,
      label,
      color: BRANCH_COLORS[this.branches.length % BRANCH_COLORS.length],
    };
    this.branches.push(branch);
    this.activeIndex = this.branches.length - 1;
    return branch;
  }

  clear(): void {
    this.branches = [];
    this.activeIndex = 0;
    this.error = null;
  }
}

/** Inline fork validation; returns an error message instead of calling
 * the API when the requested step is outside the branch's history. */
export function forkRangeError(branch: BranchView, atStep: number): string | null {
  if (!Number.isInteger(atStep) || atStep < 0 || atStep > branch.series.steps.length) {
    return `fork step must be within 0..${branch.series.steps.length}`;
  }
  return null;
}
