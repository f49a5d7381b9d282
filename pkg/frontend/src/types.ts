/** DTOs mirroring the workbench service JSON. */

export interface Term {
  degree: number;
  weight: number;
}

export interface Profile {
  perspective: "edge" | "node";
  lambda: Term[];
  rho: Term[];
}

export interface ProfileOut {
  name: string;
  profile: Profile;
  design_rate: number;
}

export interface ChannelModel {
  kind: "bec" | "biawgn";
  param: number;
  rate?: number | null;
}

export interface ExitCurves {
  i_a: number[];
  i_e_vnd: number[];
  i_e_cnd: number[];
  design_rate: number;
}

export type JobKind = "sexit" | "sexit_independent" | "ber" | "analytic" | "threshold";
export type JobStatus = "queued" | "running" | "done" | "failed" | "cancelled";

export interface JobOut {
  id: string;
  kind: JobKind;
  status: JobStatus;
  progress: number;
  error?: string | null;
  result_ref?: string | null;
}

export interface HistogramLayer {
  counts: number[][];
  total: number;
}

export interface ColumnStat {
  count: number;
  mean: number;
  std: number;
  q10: number;
  q50: number;
  q90: number;
}

export interface SexitBundle {
  format: string;
  kind: "sexit" | "sexit_independent";
  config: Record<string, unknown>;
  n_grid: number;
  layers: { vnd: HistogramLayer; cnd: HistogramLayer };
  column_stats: { vnd: (ColumnStat | null)[]; cnd: (ColumnStat | null)[] };
  metrics?: {
    stuck_fraction: number;
    min_gap_band: number | null;
    min_gap_column: number | null;
    overlap_mass: number;
  };
  trajectories?: { vnd: number[][]; cnd: number[][]; converged: boolean; iterations: number }[];
}

export interface BerRow {
  channel_param: number;
  frames: number;
  bit_errors: number;
  frame_errors: number;
  ber: number;
  fer: number;
  ci_low: number;
  ci_high: number;
  undersampled: boolean;
}

export interface BerTable {
  format: string;
  config: Record<string, unknown>;
  rows: BerRow[];
}
