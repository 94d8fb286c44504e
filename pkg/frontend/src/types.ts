/** Shapes of the view documents the service delivers. */

export const RELATION_TYPES = [
  "temporal-semantic",
  "subject",
  "entity",
  "causal",
  "correspondence",
  "succession",
  "references-to",
  "consists-of",
] as const;

export type RelationType = (typeof RELATION_TYPES)[number];

export interface Interval {
  start: string;
  end: string;
}

export interface InformationObject {
  id: string;
  kind: string;
  title: string;
  body: string;
  created?: string | null;
}

export interface Concept {
  id: string;
  variant: "event" | "entity" | "subject" | "temporal-expression";
  title?: string;
  description?: string;
  anchor?: Interval | null;
  ordinal?: number | null;
  constitutive_objects?: string[];
  name?: string;
  label?: string;
  surface?: string;
}

export interface Evidence {
  holder: string;
  span: [number, number];
  surface: string;
}

export interface Relation {
  id: string;
  rel_type: RelationType;
  from: string;
  to: string;
  directed: boolean;
  evidence: Evidence[];
  weight?: number | null;
  provenance: string;
}

export interface LayoutNode {
  id: string;
  node_class: "event" | "object" | "entity-concept";
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface LayoutEdge {
  relation_id: string;
  points: number[][];
  label_anchor: number[];
  arc: boolean;
}

export interface Badge {
  event_id: string;
  overflow: number;
  x: number;
  y: number;
}

export interface Layout {
  width: number;
  height: number;
  nodes: LayoutNode[];
  edges: LayoutEdge[];
  badges: Badge[];
}

export interface RelationStyle {
  color: string;
  glyph: string | null;
  pattern: "solid" | "short-dotted" | "wide-dotted";
  arrowhead: "filled" | "open" | "none";
}

export interface StyleTable {
  event_fill: string;
  object_fill: string;
  relations: Record<string, RelationStyle>;
}

export interface ChronologyDocument {
  objects: InformationObject[];
  concepts: Concept[];
  relations: Relation[];
  meta: { name: string; schema_version: string };
}

export interface ViewDocument extends ChronologyDocument {
  layout: Layout;
  style: StyleTable;
}

export function events(doc: ChronologyDocument): Concept[] {
  return doc.concepts.filter((c) => c.variant === "event");
}

export function findObject(doc: ChronologyDocument, id: string): InformationObject | undefined {
  return doc.objects.find((o) => o.id === id);
}
