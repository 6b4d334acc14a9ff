/** Wire types for the simulation API (schema_version "1"). */

export interface TaxonomyInfo {
  sectors: string[];
  agents: string[];
  periods: string[];
  sector_tags: Record<string, string[]>;
}

export interface SessionSummary {
  id: string;
  scenario: string | null;
  step: number;
  steps: number;
  parent: { id: string; at_step: number } | null;
  taxonomy: TaxonomyInfo;
}

export interface ActionPayload {
  kind: string;
  magnitude: number;
}

export interface FramePayload {
  step: number;
  gdp_growth: number;
  inflation: number;
  unemployment: number;
  trade_balance: number;
  economic_resistance: number;
  actions: ActionPayload[];
}

export interface SeriesPayload {
  schema_version: string;
  session: SessionSummary;
  frames: FramePayload[];
}

export interface ScenarioInfo {
  name: string;
  description: string;
  steps: number;
}

export type InterventionKind = "spending" | "tax_cut" | "subsidy";

export const INTERVENTION_KINDS: InterventionKind[] = [
  "spending",
  "tax_cut",
  "subsidy",
];

/** Intervention as posted to the step endpoint (labels, not indices). */
export interface Intervention {
  kind: InterventionKind;
  magnitude: number;
  sectors: string[];
  agents: string[];
}

export interface ApiErrorBody {
  schema_version: string;
  error: { code: string; message: string };
}
