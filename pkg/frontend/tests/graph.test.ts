import { describe, expect, it } from 'vitest';

import { colliderNames, layerAssignment, layoutGraph } from '../src/graph.js';
import { ModelDocument } from '../src/types.js';

const ID_MODEL: ModelDocument = {
  name: 'id-credibility',
  variables: [
    { name: 'Reliability', states: ['low', 'medium', 'high'] },
    { name: 'Valid', states: ['yes', 'no'] },
    { name: 'Validation', states: ['pass', 'fail'] },
    { name: 'Credibility', states: ['low', 'medium', 'high'] },
  ],
  edges: [
    ['Reliability', 'Validation'],
    ['Valid', 'Validation'],
    ['Validation', 'Credibility'],
  ],
  cpts: {},
};

describe('collider detection (edge counting only)', () => {
  it('flags nodes with two or more parents', () => {
    expect(colliderNames(ID_MODEL)).toEqual(new Set(['Validation']));
  });

  it('six-parent fan-in is a collider', () => {
    const attrs = ['A', 'B', 'C', 'D', 'E', 'F'];
    const model: ModelDocument = {
      name: 'fan',
      variables: [...attrs, 'Sink'].map((n) => ({ name: n, states: ['0', '1'] })),
      edges: attrs.map((a) => [a, 'Sink'] as [string, string]),
      cpts: {},
    };
    expect(colliderNames(model)).toEqual(new Set(['Sink']));
  });
});

describe('layered layout', () => {
  it('assigns roots to layer 0 and children below their deepest parent', () => {
    const layers = layerAssignment(ID_MODEL);
    expect(layers.get('Reliability')).toBe(0);
    expect(layers.get('Valid')).toBe(0);
    expect(layers.get('Validation')).toBe(1);
    expect(layers.get('Credibility')).toBe(2);
  });

  it('produces one positioned node per variable with all edges kept', () => {
    const layout = layoutGraph(ID_MODEL);
    expect(layout.nodes.map((n) => n.name).sort()).toEqual(
      ['Credibility', 'Reliability', 'Valid', 'Validation'],
    );
    expect(layout.edges).toEqual(ID_MODEL.edges);
    expect(layout.nodes.find((n) => n.name === 'Validation')!.isCollider).toBe(true);
    const xs = new Set(layout.nodes.map((n) => `${n.name}:${n.x},${n.y}`));
    expect(xs.size).toBe(4); // distinct positions
  });
});
