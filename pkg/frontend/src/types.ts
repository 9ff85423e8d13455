/**
 * Wire types mirroring the secready HTTP API documents.
 * Every number shown in the UI comes from one of these; the client never
 * aggregates scores itself.
 */

export interface ScaleLevel {
  value: number;
  label: string;
}

export interface FrameworkSummary {
  id: string;
  name: string;
  version: string;
  domain_count: number;
  control_count: number;
  leaf_count: number;
}

/** Framework tree node: aggregates carry children, leaves carry a question. */
export interface FrameworkNode {
  id: string;
  name: string;
  iso_ref?: string;
  question?: string;
  children?: FrameworkNode[];
}

export interface FrameworkDoc {
  id: string;
  name: string;
  version: string;
  scale: ScaleLevel[];
  domains: FrameworkNode[];
}

export interface SessionDoc {
  session_id: string;
  user_id: string;
  framework_id: string;
  status: "open" | "finalized";
  answers: Record<string, number>;
  started_at: string;
  finalized_at: string | null;
}

export interface UserDoc {
  user_id: string;
  display_name: string;
  created_at: string;
}

export interface NodeScoreDoc {
  node_id: string;
  label: string;
  achievement: number | null;
  priority: number | null;
  coverage: number;
  children: NodeScoreDoc[];
}

export interface ResultDoc {
  framework_id: string;
  mode: "strict" | "provisional";
  answered_count: number;
  total_leaves: number;
  root: NodeScoreDoc;
}

export interface HistogramBarDoc {
  node_id: string;
  label: string;
  achievement: number;
  priority: number;
}

export interface HistogramDoc {
  level: "domains" | "controls";
  bars: HistogramBarDoc[];
}

export interface SummaryDoc {
  overall_achievement: number;
  overall_percent: number;
  predicate: string;
  strongest_domains: string[];
  weakest_domains: string[];
  advice: string;
}

export interface TrendPointDoc {
  session_id: string;
  finalized_at: string;
  overall_achievement: number;
}

export interface TrendDoc {
  user_id: string;
  points: TrendPointDoc[];
  deltas: number[];
}

export interface ApiErrorDoc {
  code: string;
  message: string;
  details?: string[];
}
