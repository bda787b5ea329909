/** Console view-model: session state plus the operator workflows.
 *
 * Every probability held here is stored verbatim from a service response;
 * this module performs no probability arithmetic. Panels refresh through a
 * shared generation counter so a posterior and a gauge never mix responses
 * from different evidence states, and late responses are dropped
 * (latest-wins). What-if reads never mutate session evidence. The decision
 * history is append-only: entries are frozen as they arrive.
 */

import { ServiceApi } from './api.js';
import { GraphLayout, layoutGraph } from './graph.js';
import {
  ApiError,
  DecisionCostsDoc,
  LogEntryDoc,
  ModelDocument,
  RtbQueryDoc,
  RtbReportDoc,
} from './types.js';

export interface PosteriorPanel {
  target: string;
  states: Record<string, number>;
  generation: number;
}

export interface RtbPanel {
  report: RtbReportDoc;
  generation: number;
}

export interface WhatIfPanel {
  doAssignments: Record<string, string>;
  factual: Record<string, number>;
  intervened: Record<string, number>;
  target: string;
}

export interface DecisionPreview {
  costs: DecisionCostsDoc;
  /** Cost arithmetic on the server-supplied trust; recomputed server-side
   * when the decision is actually logged. */
  threshold: number;
  wouldAccept: boolean;
}

export interface ConsoleState {
  models: string[];
  sessionId: string | null;
  modelName: string | null;
  model: ModelDocument | null;
  graph: GraphLayout | null;
  evidence: Record<string, string>;
  selectedTarget: string | null;
  acceptState: string | null;
  impactCosts: Record<string, number> | null;
  posterior: PosteriorPanel | null;
  rtb: RtbPanel | null;
  whatIf: WhatIfPanel | null;
  history: readonly LogEntryDoc[];
  decisionPreview: DecisionPreview | null;
  error: string | null;
  busy: boolean;
}

function initialState(): ConsoleState {
  return {
    models: [],
    sessionId: null,
    modelName: null,
    model: null,
    graph: null,
    evidence: {},
    selectedTarget: null,
    acceptState: null,
    impactCosts: null,
    posterior: null,
    rtb: null,
    whatIf: null,
    history: [],
    decisionPreview: null,
    error: null,
    busy: false,
  };
}

export type Listener = (state: ConsoleState) => void;

export class ConsoleController {
  private state: ConsoleState = initialState();
  private listeners: Listener[] = [];
  private generation = 0;

  constructor(private readonly api: ServiceApi) {}

  getState(): ConsoleState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private update(patch: Partial<ConsoleState>): void {
    this.state = { ...this.state, ...patch };
    for (const l of this.listeners) l(this.state);
  }

  private fail(err: unknown): void {
    const message = err instanceof ApiError ? err.name_ : err instanceof Error ? err.message : String(err);
    this.update({ error: message, busy: false });
  }

  dismissError(): void {
    this.update({ error: null });
  }

  async loadModels(): Promise<void> {
    try {
      this.update({ models: await this.api.listModels(), error: null });
    } catch (err) {
      this.fail(err);
    }
  }

  async openSession(modelName: string): Promise<void> {
    this.update({ busy: true, error: null });
    try {
      const { session_id } = await this.api.createSession(modelName);
      const model = await this.api.modelDocument(modelName);
      const evidence = await this.api.getEvidence(session_id);
      const firstTarget = model.variables[0]?.name ?? null;
      this.state = {
        ...initialState(),
        models: this.state.models,
        sessionId: session_id,
        modelName,
        model,
        graph: layoutGraph(model),
        evidence,
        selectedTarget: firstTarget,
        acceptState: firstTarget ? model.variables[0].states[0] : null,
      };
      this.update({ busy: false });
      await this.refreshPanels();
    } catch (err) {
      this.fail(err);
    }
  }

  async selectTarget(variable: string, acceptState?: string): Promise<void> {
    const v = this.state.model?.variables.find((x) => x.name === variable);
    if (!v) return;
    this.update({
      selectedTarget: variable,
      acceptState: acceptState ?? v.states[0],
      whatIf: null,
      impactCosts: null,
    });
    await this.refreshPanels();
  }

  setImpactCosts(costs: Record<string, number> | null): Promise<void> {
    this.update({ impactCosts: costs });
    return this.refreshPanels();
  }

  async submitEvidence(variable: string, state: string): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const evidence = await this.api.postEvidence(this.state.sessionId, variable, state);
      this.update({ evidence, error: null });
      await this.refreshPanels();
    } catch (err) {
      this.fail(err);
    }
  }

  async retractEvidence(variable: string): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const evidence = await this.api.deleteEvidence(this.state.sessionId, variable);
      this.update({ evidence, error: null });
      await this.refreshPanels();
    } catch (err) {
      this.fail(err);
    }
  }

  /** Observed variables cannot be query targets (the service rejects
   * target-in-evidence), so the target slides to the first unobserved
   * variable when its own value gets pinned. */
  private ensureQueryableTarget(): void {
    const { model, evidence, selectedTarget } = this.state;
    if (!model) return;
    if (selectedTarget && evidence[selectedTarget] === undefined) return;
    const free = model.variables.find((v) => evidence[v.name] === undefined);
    this.update({
      selectedTarget: free?.name ?? null,
      acceptState: free ? free.states[0] : null,
      whatIf: null,
    });
  }

  /** Refresh posterior and R-T-B panels from the server under one shared
   * generation; stale responses (an older generation) are discarded. */
  async refreshPanels(): Promise<void> {
    this.ensureQueryableTarget();
    const { sessionId, selectedTarget, acceptState } = this.state;
    if (!sessionId) return;
    if (!selectedTarget || !acceptState) {
      this.update({ posterior: null, rtb: null });
      return;
    }
    const generation = ++this.generation;
    const query: RtbQueryDoc = {
      order: 1,
      kind: 'Bias',
      level: 'association',
      target: { variable: selectedTarget, state: acceptState },
      impact: this.state.impactCosts ? { costs: this.state.impactCosts } : null,
    };
    try {
      const [posterior, report] = await Promise.all([
        this.api.posterior(sessionId, selectedTarget),
        this.api.rtb(sessionId, query),
      ]);
      if (generation !== this.generation) return; // a newer refresh superseded this one
      this.update({
        posterior: { target: selectedTarget, states: posterior.states, generation },
        rtb: { report, generation },
        decisionPreview: null,
        error: null,
      });
    } catch (err) {
      if (generation === this.generation) this.fail(err);
    }
  }

  /** Side-by-side factual vs intervened posteriors; session evidence is
   * read, never written. */
  async runWhatIf(doAssignments: Record<string, string>): Promise<void> {
    this.ensureQueryableTarget();
    const { sessionId, selectedTarget } = this.state;
    if (!sessionId || !selectedTarget) return;
    try {
      const [factual, intervened] = await Promise.all([
        this.api.posterior(sessionId, selectedTarget),
        this.api.posterior(sessionId, selectedTarget, 'do', doAssignments),
      ]);
      this.update({
        whatIf: {
          doAssignments,
          factual: factual.states,
          intervened: intervened.states,
          target: selectedTarget,
        },
        error: null,
      });
    } catch (err) {
      this.fail(err);
    }
  }

  clearWhatIf(): void {
    this.update({ whatIf: null });
  }

  /** Promote the pending what-if to the session's current report so the next
   * logged decision carries it as rationale. */
  async promoteWhatIf(): Promise<void> {
    const { sessionId, whatIf, acceptState } = this.state;
    if (!sessionId || !whatIf || !acceptState) return;
    const doCount = Object.keys(whatIf.doAssignments).length;
    // order mirrors the taxonomy: one conditioning do-variable per order
    // step; the server rejects shapes outside the taxonomy (doCount > 2).
    const query: RtbQueryDoc = {
      order: (1 + doCount) as 1 | 2 | 3,
      kind: 'Trust',
      level: 'intervention',
      target: { variable: whatIf.target, state: acceptState },
      do: whatIf.doAssignments,
    };
    try {
      const report = await this.api.rtb(sessionId, query);
      this.update({ rtb: { report, generation: ++this.generation }, error: null });
    } catch (err) {
      this.fail(err);
    }
  }

  /** Threshold slider: preview only, nothing is logged. The trust value is
   * the server's; the comparison is plain cost arithmetic. */
  previewDecision(costs: DecisionCostsDoc): void {
    const report = this.state.rtb?.report;
    if (!report) return;
    const threshold = Math.min(1, Math.max(0, 1 - costs.verify / costs.wrong_accept));
    this.update({
      decisionPreview: { costs, threshold, wouldAccept: report.trust > threshold },
    });
  }

  async recordDecision(action: 'accept' | 'verify', costs: DecisionCostsDoc): Promise<void> {
    const { sessionId } = this.state;
    if (!sessionId) return;
    try {
      const entry = await this.api.decision(sessionId, costs, action);
      this.update({ history: [...this.state.history, Object.freeze(entry)], error: null });
    } catch (err) {
      this.fail(err);
    }
  }

  async reloadHistory(): Promise<void> {
    const { sessionId } = this.state;
    if (!sessionId) return;
    try {
      const log = await this.api.log(sessionId);
      this.update({ history: log.map((e) => Object.freeze(e)), error: null });
    } catch (err) {
      this.fail(err);
    }
  }
}
