/** End-to-end: drive the console view-model against a real running service.
 *
 * Spawns the Python service (`rtb serve`) on a scratch port, then exercises
 * the operator flows over actual HTTP: the conflict-scenario evidence pair,
 * a non-mutating what-if, and an operator override. Run `pip install -e .`
 * in the repo root first so the `rtb` entry point exists.
 */

import { ChildProcess, spawn } from 'node:child_process';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { ConsoleController } from '../src/controller.js';

const PORT = 8930 + Math.floor(Math.random() * 50);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForService(timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/models`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`service did not come up on ${BASE}`);
}

beforeAll(async () => {
  server = spawn('rtb', ['serve', '--port', String(PORT)], { stdio: 'ignore' });
  await waitForService();
}, 30000);

afterAll(() => {
  server?.kill('SIGTERM');
});

describe('operator console against the live service', () => {
  it('conflict evidence pair moves the Valid posterior panel to the service value', async () => {
    const api = new ApiClient(BASE);
    const controller = new ConsoleController(api);
    await controller.loadModels();
    expect(controller.getState().models).toContain('id-credibility');
    await controller.openSession('id-credibility');
    await controller.selectTarget('Valid', 'yes');

    const before = controller.getState().posterior!.states.yes;
    await controller.submitEvidence('Reliability', 'low');
    await controller.submitEvidence('Credibility', 'high');

    const panel = controller.getState().posterior!;
    const sessionId = controller.getState().sessionId!;
    const direct = await api.posterior(sessionId, 'Valid');
    expect(panel.states).toEqual(direct.states);
    expect(panel.states.yes).toBeGreaterThan(before); // belief shifted toward validity
    expect(controller.getState().rtb!.report.trust).toBe(direct.states.yes);
  });

  it('what-if do-query leaves session evidence unchanged on refetch', async () => {
    const api = new ApiClient(BASE);
    const controller = new ConsoleController(api);
    await controller.loadModels();
    await controller.openSession('id-credibility');
    await controller.submitEvidence('Reliability', 'low');
    await controller.selectTarget('Credibility');
    const sessionId = controller.getState().sessionId!;

    const evidenceBefore = await api.getEvidence(sessionId);
    await controller.runWhatIf({ Validation: 'pass' });
    const whatIf = controller.getState().whatIf!;
    expect(Object.keys(whatIf.factual).sort()).toEqual(['high', 'low', 'medium']);
    expect(whatIf.intervened).not.toEqual(whatIf.factual); // forcing validation moves credibility

    const evidenceAfter = await api.getEvidence(sessionId);
    expect(evidenceAfter).toEqual(evidenceBefore);
    expect(evidenceAfter).toEqual({ Reliability: 'low' });
  });

  it('operator override is flagged in the history', async () => {
    const api = new ApiClient(BASE);
    const controller = new ConsoleController(api);
    await controller.loadModels();
    await controller.openSession('id-credibility');
    await controller.submitEvidence('Reliability', 'low');
    await controller.submitEvidence('Credibility', 'high');

    // trust 0.955 > default threshold 0.9 -> recommendation Accept; verify anyway
    await controller.recordDecision('verify', { verify: 1, wrong_accept: 10 });
    const [entry] = controller.getState().history;
    expect(entry.recommendation).toBe('Accept');
    expect(entry.operator_action).toBe('verify');
    expect(entry.override).toBe(true);

    await controller.reloadHistory();
    expect(controller.getState().history).toHaveLength(1);
    expect(controller.getState().history[0].override).toBe(true);
  });

  it('server error names surface in the console state', async () => {
    const api = new ApiClient(BASE);
    const controller = new ConsoleController(api);
    await controller.loadModels();
    await controller.openSession('face-bias');
    await controller.submitEvidence('Correctness', 'correct');
    await controller.submitEvidence('Match', 'mismatch'); // impossible jointly
    expect(controller.getState().error).toBe('zero-probability-evidence');
  });

  it('do on a root variable previews the same numbers as conditioning on it', async () => {
    const api = new ApiClient(BASE);
    const controller = new ConsoleController(api);
    await controller.loadModels();
    await controller.openSession('id-credibility');
    await controller.selectTarget('Credibility');
    const sessionId = controller.getState().sessionId!;

    await controller.runWhatIf({ Reliability: 'high' });
    const viaDo = controller.getState().whatIf!.intervened;

    await controller.submitEvidence('Reliability', 'high');
    const viaSee = await api.posterior(sessionId, 'Credibility');
    for (const state of Object.keys(viaSee.states)) {
      expect(viaDo[state]).toBeCloseTo(viaSee.states[state], 9);
    }
  });
});
