/** DOM rendering of the console state. Presentation only: numbers are
 * formatted for display but every value comes from the state (and therefore
 * from a service response); raw values are kept in tooltips. */

import { ConsoleController, ConsoleState } from './controller.js';
import { GraphLayout } from './graph.js';
import { LogEntryDoc } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmt(p: number): string {
  return p.toFixed(6);
}

export class ConsoleRenderer {
  constructor(
    private readonly root: HTMLElement,
    private readonly controller: ConsoleController,
  ) {
    controller.subscribe((state) => this.render(state));
  }

  render(state: ConsoleState): void {
    this.root.replaceChildren();
    this.root.appendChild(this.renderHeader(state));
    if (state.error) this.root.appendChild(this.renderError(state));
    if (!state.sessionId) {
      if (state.models.length === 0) {
        this.root.appendChild(el('p', { class: 'empty' }, 'No models available.'));
      }
      return;
    }
    const main = el('div', { class: 'columns' });
    const left = el('div', { class: 'col graph-col' });
    if (state.graph) left.appendChild(this.renderGraph(state));
    left.appendChild(this.renderEvidenceControls(state));
    main.appendChild(left);

    const right = el('div', { class: 'col panels-col' });
    right.appendChild(this.renderPosteriorPanel(state));
    right.appendChild(this.renderRtbPanel(state));
    right.appendChild(this.renderWhatIfPanel(state));
    right.appendChild(this.renderDecisionPanel(state));
    right.appendChild(this.renderHistory(state.history));
    main.appendChild(right);
    this.root.appendChild(main);
  }

  private renderHeader(state: ConsoleState): HTMLElement {
    const header = el('header');
    header.appendChild(el('h1', {}, 'R-T-B Operator Console'));
    const picker = el('select', { class: 'model-picker' });
    picker.appendChild(el('option', { value: '' }, 'choose a model…'));
    for (const name of state.models) {
      const opt = el('option', { value: name }, name);
      if (name === state.modelName) opt.selected = true;
      picker.appendChild(opt);
    }
    picker.addEventListener('change', () => {
      if (picker.value) void this.controller.openSession(picker.value);
    });
    header.appendChild(picker);
    if (state.sessionId) {
      header.appendChild(el('span', { class: 'session-id', title: state.sessionId }, `session ${state.sessionId.slice(0, 8)}`));
    }
    return header;
  }

  private renderError(state: ConsoleState): HTMLElement {
    const banner = el('div', { class: 'error-banner', role: 'alert' });
    banner.appendChild(el('span', {}, state.error ?? ''));
    const dismiss = el('button', {}, 'dismiss');
    dismiss.addEventListener('click', () => this.controller.dismissError());
    banner.appendChild(dismiss);
    return banner;
  }

  private renderGraph(state: ConsoleState): HTMLElement {
    const layout = state.graph as GraphLayout;
    const wrap = el('section', { class: 'graph-panel' });
    wrap.appendChild(el('h2', {}, 'Model graph'));
    const svg = document.createElementNS(SVG_NS, 'svg');
    svg.setAttribute('viewBox', `0 0 ${layout.width} ${layout.height}`);
    svg.setAttribute('class', 'dag');

    const marker = document.createElementNS(SVG_NS, 'marker');
    marker.setAttribute('id', 'arrow');
    marker.setAttribute('viewBox', '0 0 10 10');
    marker.setAttribute('refX', '9');
    marker.setAttribute('refY', '5');
    marker.setAttribute('markerWidth', '7');
    marker.setAttribute('markerHeight', '7');
    marker.setAttribute('orient', 'auto-start-reverse');
    const tip = document.createElementNS(SVG_NS, 'path');
    tip.setAttribute('d', 'M 0 0 L 10 5 L 0 10 z');
    tip.setAttribute('fill', '#8bb');
    marker.appendChild(tip);
    svg.appendChild(marker);

    const position = new Map(layout.nodes.map((n) => [n.name, n]));
    for (const [parent, child] of layout.edges) {
      const a = position.get(parent);
      const b = position.get(child);
      if (!a || !b) continue;
      const line = document.createElementNS(SVG_NS, 'line');
      line.setAttribute('x1', String(a.x + 60));
      line.setAttribute('y1', String(a.y + 18));
      line.setAttribute('x2', String(b.x - 4));
      line.setAttribute('y2', String(b.y + 18));
      line.setAttribute('class', 'edge');
      line.setAttribute('marker-end', 'url(#arrow)');
      svg.appendChild(line);
    }
    for (const node of layout.nodes) {
      const group = document.createElementNS(SVG_NS, 'g');
      group.setAttribute('transform', `translate(${node.x - 60}, ${node.y})`);
      group.setAttribute('class', 'node-group');
      const rect = document.createElementNS(SVG_NS, 'rect');
      rect.setAttribute('width', '120');
      rect.setAttribute('height', '36');
      rect.setAttribute('rx', '7');
      const classes = ['node'];
      if (node.name === state.selectedTarget) classes.push('selected');
      if (node.isCollider) classes.push('collider');
      if (state.evidence[node.name] !== undefined) classes.push('evidence');
      rect.setAttribute('class', classes.join(' '));
      group.appendChild(rect);
      const label = document.createElementNS(SVG_NS, 'text');
      label.setAttribute('x', '60');
      label.setAttribute('y', '16');
      label.setAttribute('text-anchor', 'middle');
      label.textContent = node.name;
      group.appendChild(label);
      const badge = document.createElementNS(SVG_NS, 'text');
      badge.setAttribute('x', '60');
      badge.setAttribute('y', '30');
      badge.setAttribute('text-anchor', 'middle');
      badge.setAttribute('class', 'badge');
      badge.textContent = state.evidence[node.name] !== undefined ? `= ${state.evidence[node.name]}` : '';
      group.appendChild(badge);
      group.addEventListener('click', () => void this.controller.selectTarget(node.name));
      svg.appendChild(group);
    }
    wrap.appendChild(svg);
    wrap.appendChild(
      el('p', { class: 'hint' }, 'Click a node to make it the query target. Diamond-bordered nodes are colliders; filled nodes carry evidence.'),
    );
    return wrap;
  }

  private renderEvidenceControls(state: ConsoleState): HTMLElement {
    const wrap = el('section', { class: 'evidence-panel' });
    wrap.appendChild(el('h2', {}, 'Evidence'));
    const form = el('div', { class: 'evidence-form' });
    const varPick = el('select', { id: 'evidence-var' });
    const statePick = el('select', { id: 'evidence-state' });
    const fillStates = () => {
      statePick.replaceChildren();
      const v = state.model?.variables.find((x) => x.name === varPick.value);
      for (const s of v?.states ?? []) statePick.appendChild(el('option', { value: s }, s));
    };
    for (const v of state.model?.variables ?? []) varPick.appendChild(el('option', { value: v.name }, v.name));
    varPick.addEventListener('change', fillStates);
    fillStates();
    const observe = el('button', {}, 'observe');
    observe.addEventListener('click', () => void this.controller.submitEvidence(varPick.value, statePick.value));
    form.append(varPick, statePick, observe);
    wrap.appendChild(form);

    const list = el('ul', { class: 'evidence-list' });
    for (const [variable, value] of Object.entries(state.evidence)) {
      const item = el('li');
      item.appendChild(el('span', {}, `${variable} = ${value}`));
      const retract = el('button', { class: 'retract' }, 'retract');
      retract.addEventListener('click', () => void this.controller.retractEvidence(variable));
      item.appendChild(retract);
      list.appendChild(item);
    }
    wrap.appendChild(list);
    return wrap;
  }

  private renderDistribution(states: Record<string, number>): HTMLElement {
    const table = el('table', { class: 'dist' });
    for (const [stateName, p] of Object.entries(states)) {
      const row = el('tr');
      row.appendChild(el('td', {}, stateName));
      const bar = el('td', { class: 'bar-cell' });
      const fill = el('div', { class: 'bar' });
      fill.style.width = `${(p * 100).toFixed(2)}%`;
      bar.appendChild(fill);
      row.appendChild(bar);
      row.appendChild(el('td', { class: 'mono', title: String(p) }, fmt(p)));
      table.appendChild(row);
    }
    return table;
  }

  private renderPosteriorPanel(state: ConsoleState): HTMLElement {
    const wrap = el('section', { class: 'posterior-panel' });
    wrap.appendChild(el('h2', {}, `Posterior: ${state.posterior?.target ?? state.selectedTarget ?? '—'}`));
    if (state.posterior) wrap.appendChild(this.renderDistribution(state.posterior.states));
    return wrap;
  }

  private renderRtbPanel(state: ConsoleState): HTMLElement {
    const wrap = el('section', { class: 'rtb-panel' });
    wrap.appendChild(el('h2', {}, 'Risk / Trust / Bias'));
    const report = state.rtb?.report;
    if (!report) return wrap;

    const grid = el('div', { class: 'rtb-grid' });
    grid.appendChild(el('div', { class: 'rtb-label' }, 'risk'));
    grid.appendChild(
      el('div', { class: 'mono', title: report.risk === null ? '' : String(report.risk) },
        report.risk === null ? 'n/a (no impact model)' : fmt(report.risk)),
    );
    grid.appendChild(el('div', { class: 'rtb-label' }, 'trust bias'));
    grid.appendChild(
      el('div', { class: 'mono', title: report.trust_bias === null ? '' : String(report.trust_bias) },
        report.trust_bias === null ? 'n/a' : fmt(report.trust_bias)),
    );
    wrap.appendChild(grid);

    // trust gauge and threshold marker share one [0,1] axis
    const preview = state.decisionPreview;
    const threshold = preview ? preview.threshold : report.threshold;
    const gauge = el('div', { class: 'gauge', title: `trust ${report.trust}` });
    const fill = el('div', { class: 'gauge-fill' });
    fill.style.width = `${(report.trust * 100).toFixed(2)}%`;
    gauge.appendChild(fill);
    const markerDiv = el('div', { class: 'gauge-threshold', title: `threshold ${threshold}` });
    markerDiv.style.left = `${(threshold * 100).toFixed(2)}%`;
    gauge.appendChild(markerDiv);
    wrap.appendChild(gauge);
    const caption = el('p', { class: 'gauge-caption mono' },
      `trust ${fmt(report.trust)} | threshold ${fmt(threshold)}`);
    wrap.appendChild(caption);

    const verdict = preview
      ? (preview.wouldAccept ? 'Accept' : 'Verify') + ' (preview)'
      : report.recommendation;
    wrap.appendChild(el('p', { class: `recommendation ${verdict.startsWith('Accept') ? 'ok' : 'warn'}` }, verdict));
    return wrap;
  }

  private renderWhatIfPanel(state: ConsoleState): HTMLElement {
    const wrap = el('section', { class: 'whatif-panel' });
    wrap.appendChild(el('h2', {}, 'What-if (interventions)'));
    const form = el('div', { class: 'evidence-form' });
    const varPick = el('select', { id: 'whatif-var' });
    const statePick = el('select', { id: 'whatif-state' });
    const fillStates = () => {
      statePick.replaceChildren();
      const v = state.model?.variables.find((x) => x.name === varPick.value);
      for (const s of v?.states ?? []) statePick.appendChild(el('option', { value: s }, s));
    };
    for (const v of state.model?.variables ?? []) varPick.appendChild(el('option', { value: v.name }, v.name));
    varPick.addEventListener('change', fillStates);
    fillStates();
    const run = el('button', {}, 'compare do(…)');
    run.addEventListener('click', () => void this.controller.runWhatIf({ [varPick.value]: statePick.value }));
    form.append(varPick, statePick, run);
    wrap.appendChild(form);

    if (state.whatIf) {
      const pair = el('div', { class: 'whatif-pair' });
      const factual = el('div');
      factual.appendChild(el('h3', {}, 'factual'));
      factual.appendChild(this.renderDistribution(state.whatIf.factual));
      const intervened = el('div');
      const doText = Object.entries(state.whatIf.doAssignments).map(([k, v]) => `${k}=${v}`).join(', ');
      intervened.appendChild(el('h3', {}, `do(${doText})`));
      intervened.appendChild(this.renderDistribution(state.whatIf.intervened));
      pair.append(factual, intervened);
      wrap.appendChild(pair);
      const promote = el('button', { class: 'promote' }, 'promote to decision rationale');
      promote.addEventListener('click', () => void this.controller.promoteWhatIf());
      wrap.appendChild(promote);
    }
    return wrap;
  }

  private renderDecisionPanel(_state: ConsoleState): HTMLElement {
    const wrap = el('section', { class: 'decision-panel' });
    wrap.appendChild(el('h2', {}, 'Decision'));
    const form = el('div', { class: 'decision-form' });
    const verify = el('input', { id: 'cost-verify', type: 'number', value: '1', min: '0', step: '0.5' });
    const wrongAccept = el('input', { id: 'cost-wrong', type: 'number', value: '10', min: '0.5', step: '0.5' });
    const preview = () =>
      this.controller.previewDecision({ verify: Number(verify.value), wrong_accept: Number(wrongAccept.value) });
    verify.addEventListener('input', preview);
    wrongAccept.addEventListener('input', preview);
    form.appendChild(el('label', {}, 'cost of verification'));
    form.appendChild(verify);
    form.appendChild(el('label', {}, 'cost of wrong acceptance'));
    form.appendChild(wrongAccept);
    const acceptBtn = el('button', { class: 'accept' }, 'accept');
    const verifyBtn = el('button', { class: 'verify' }, 'verify');
    const costs = () => ({ verify: Number(verify.value), wrong_accept: Number(wrongAccept.value) });
    acceptBtn.addEventListener('click', () => void this.controller.recordDecision('accept', costs()));
    verifyBtn.addEventListener('click', () => void this.controller.recordDecision('verify', costs()));
    form.append(acceptBtn, verifyBtn);
    wrap.appendChild(form);
    return wrap;
  }

  private renderHistory(history: readonly LogEntryDoc[]): HTMLElement {
    const wrap = el('section', { class: 'history-panel' });
    wrap.appendChild(el('h2', {}, `Decision history (${history.length})`));
    const table = el('table', { class: 'history' });
    const head = el('tr');
    for (const h of ['time', 'trust', 'threshold', 'recommended', 'operator', 'override']) {
      head.appendChild(el('th', {}, h));
    }
    table.appendChild(head);
    for (const entry of history) {
      const row = el('tr', { class: entry.override ? 'override-row' : '' });
      row.appendChild(el('td', {}, entry.timestamp.replace('T', ' ').slice(0, 19)));
      row.appendChild(el('td', { class: 'mono', title: String(entry.report.trust) }, fmt(entry.report.trust)));
      row.appendChild(el('td', { class: 'mono', title: String(entry.threshold) }, fmt(entry.threshold)));
      row.appendChild(el('td', {}, entry.recommendation));
      row.appendChild(el('td', {}, entry.operator_action));
      row.appendChild(el('td', { class: entry.override ? 'flag' : '' }, entry.override ? 'OVERRIDE' : ''));
      table.appendChild(row);
    }
    wrap.appendChild(table);
    return wrap;
  }
}
