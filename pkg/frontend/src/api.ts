/** Typed client for the rtb-dss service. Every method maps to one endpoint;
 * nothing is computed here beyond JSON (de)serialization. */

import {
  ApiError,
  DecisionCostsDoc,
  LogEntryDoc,
  ModelDocument,
  PosteriorResponse,
  RtbQueryDoc,
  RtbReportDoc,
} from './types.js';

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What the console needs from the service; `ApiClient` is the real
 * implementation and tests substitute stubs. */
export interface ServiceApi {
  listModels(): Promise<string[]>;
  modelDocument(name: string): Promise<ModelDocument>;
  createSession(model: string): Promise<{ session_id: string }>;
  getEvidence(sessionId: string): Promise<Record<string, string>>;
  postEvidence(sessionId: string, variable: string, state: string): Promise<Record<string, string>>;
  deleteEvidence(sessionId: string, variable: string): Promise<Record<string, string>>;
  posterior(
    sessionId: string,
    target: string,
    level?: 'assoc' | 'do' | 'cf',
    doAssignments?: Record<string, string>,
  ): Promise<PosteriorResponse>;
  rtb(sessionId: string, query: RtbQueryDoc): Promise<RtbReportDoc>;
  decision(sessionId: string, costs: DecisionCostsDoc, action: 'accept' | 'verify'): Promise<LogEntryDoc>;
  log(sessionId: string): Promise<LogEntryDoc[]>;
}

export class ApiClient implements ServiceApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'Content-Type': 'application/json' } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const payload = await response.json();
    if (!response.ok) {
      const name = payload && typeof payload.error === 'string' ? payload.error : 'request-failed';
      throw new ApiError(name, response.status);
    }
    return payload as T;
  }

  listModels(): Promise<string[]> {
    return this.request('GET', '/models');
  }

  modelDocument(name: string): Promise<ModelDocument> {
    return this.request('GET', `/models/${encodeURIComponent(name)}`);
  }

  createSession(model: string): Promise<{ session_id: string }> {
    return this.request('POST', '/sessions', { model });
  }

  getEvidence(sessionId: string): Promise<Record<string, string>> {
    return this.request('GET', `/sessions/${sessionId}/evidence`);
  }

  postEvidence(sessionId: string, variable: string, state: string): Promise<Record<string, string>> {
    return this.request('POST', `/sessions/${sessionId}/evidence`, { variable, state });
  }

  deleteEvidence(sessionId: string, variable: string): Promise<Record<string, string>> {
    return this.request('DELETE', `/sessions/${sessionId}/evidence/${encodeURIComponent(variable)}`);
  }

  posterior(
    sessionId: string,
    target: string,
    level: 'assoc' | 'do' | 'cf' = 'assoc',
    doAssignments?: Record<string, string>,
  ): Promise<PosteriorResponse> {
    const params = new URLSearchParams({ target, level });
    if (doAssignments && Object.keys(doAssignments).length > 0) {
      params.set(
        'do',
        Object.entries(doAssignments)
          .map(([k, v]) => `${k}:${v}`)
          .join(','),
      );
    }
    return this.request('GET', `/sessions/${sessionId}/posterior?${params.toString()}`);
  }

  rtb(sessionId: string, query: RtbQueryDoc): Promise<RtbReportDoc> {
    return this.request('POST', `/sessions/${sessionId}/rtb`, { query });
  }

  decision(sessionId: string, costs: DecisionCostsDoc, action: 'accept' | 'verify'): Promise<LogEntryDoc> {
    return this.request('POST', `/sessions/${sessionId}/decision`, { costs, action });
  }

  log(sessionId: string): Promise<LogEntryDoc[]> {
    return this.request('GET', `/sessions/${sessionId}/log`);
  }
}
