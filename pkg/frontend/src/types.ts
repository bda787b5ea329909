/** Wire formats of the rtb-dss HTTP service, mirrored 1:1. */

export interface ModelVariable {
  name: string;
  states: string[];
}

export interface ModelDocument {
  name: string;
  variables: ModelVariable[];
  edges: [string, string][];
  cpts: Record<string, { parents: string[]; table: number[][] }>;
  mechanisms?: Record<string, unknown>;
}

export interface PosteriorResponse {
  states: Record<string, number>;
}

export type QueryKind = 'Risk' | 'Trust' | 'Bias';
export type QueryLevel = 'association' | 'intervention' | 'counterfactual';

export interface RtbQueryDoc {
  order: 1 | 2 | 3;
  kind: QueryKind;
  level: QueryLevel;
  target: { variable: string; state: string };
  given?: Record<string, string>;
  do?: Record<string, string>;
  impact?: { costs: Record<string, number> } | null;
}

export interface RtbReportDoc {
  risk: number | null;
  trust: number;
  trust_bias: number | null;
  recommendation: 'Accept' | 'Verify';
  threshold: number;
  query_echo: RtbQueryDoc;
}

export interface DecisionCostsDoc {
  verify: number;
  wrong_accept: number;
}

export interface LogEntryDoc {
  timestamp: string;
  query_echo: RtbQueryDoc;
  report: RtbReportDoc;
  operator_action: 'accept' | 'verify';
  recommendation: 'Accept' | 'Verify';
  threshold: number;
  override: boolean;
  costs: DecisionCostsDoc;
}

/** Non-2xx body shape: `{error: <stable name>}`. */
export class ApiError extends Error {
  constructor(readonly name_: string, readonly status: number) {
    super(name_);
  }
}
