/** DAG layout and structural analysis for the model view.
 * Pure graph work on the model document: no probabilities involved. */

import { ModelDocument } from './types.js';

export interface NodeLayout {
  name: string;
  states: string[];
  x: number;
  y: number;
  layer: number;
  isCollider: boolean;
}

export interface GraphLayout {
  nodes: NodeLayout[];
  edges: [string, string][];
  width: number;
  height: number;
}

/** Nodes with two or more incoming edges. */
export function colliderNames(model: ModelDocument): Set<string> {
  const indegree = new Map<string, number>();
  for (const [, child] of model.edges) {
    indegree.set(child, (indegree.get(child) ?? 0) + 1);
  }
  return new Set([...indegree.entries()].filter(([, d]) => d >= 2).map(([n]) => n));
}

/** Longest-path layering: every node sits one layer below its deepest parent. */
export function layerAssignment(model: ModelDocument): Map<string, number> {
  const parents = new Map<string, string[]>();
  for (const v of model.variables) parents.set(v.name, []);
  for (const [p, c] of model.edges) parents.get(c)?.push(p);

  const layer = new Map<string, number>();
  const resolve = (name: string, trail: Set<string>): number => {
    const known = layer.get(name);
    if (known !== undefined) return known;
    if (trail.has(name)) throw new Error(`cycle through ${name}`);
    trail.add(name);
    const ps = parents.get(name) ?? [];
    const depth = ps.length === 0 ? 0 : Math.max(...ps.map((p) => resolve(p, trail))) + 1;
    trail.delete(name);
    layer.set(name, depth);
    return depth;
  };
  for (const v of model.variables) resolve(v.name, new Set());
  return layer;
}

const COLUMN_WIDTH = 170;
const ROW_HEIGHT = 96;
const MARGIN = 60;

export function layoutGraph(model: ModelDocument): GraphLayout {
  const layers = layerAssignment(model);
  const colliders = colliderNames(model);
  const byLayer = new Map<number, string[]>();
  for (const v of model.variables) {
    const l = layers.get(v.name) ?? 0;
    if (!byLayer.has(l)) byLayer.set(l, []);
    byLayer.get(l)!.push(v.name);
  }
  const maxLayer = Math.max(...byLayer.keys());
  const maxRows = Math.max(...[...byLayer.values()].map((names) => names.length));

  const nodes: NodeLayout[] = model.variables.map((v) => {
    const l = layers.get(v.name) ?? 0;
    const siblings = byLayer.get(l)!;
    const row = siblings.indexOf(v.name);
    const offset = ((maxRows - siblings.length) * ROW_HEIGHT) / 2;
    return {
      name: v.name,
      states: v.states,
      layer: l,
      x: MARGIN + l * COLUMN_WIDTH,
      y: MARGIN + offset + row * ROW_HEIGHT,
      isCollider: colliders.has(v.name),
    };
  });

  return {
    nodes,
    edges: model.edges,
    width: 2 * MARGIN + (maxLayer + 1) * COLUMN_WIDTH,
    height: 2 * MARGIN + maxRows * ROW_HEIGHT,
  };
}
