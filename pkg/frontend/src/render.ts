/** Draws the diagram from the layout the service computed. The client
 * never positions anything itself; it only translates layout nodes,
 * edges, and badges into SVG markup. */

import {
  type Concept,
  type LayoutEdge,
  type RelationStyle,
  type ViewDocument,
  events,
} from "./types.js";
import { visibleEdges } from "./state.js";
import type { RelationType } from "./types.js";

const DASH: Record<RelationStyle["pattern"], string> = {
  solid: "",
  "short-dotted": "2,3",
  "wide-dotted": "10,7",
};

export interface RenderOptions {
  hiddenTypes?: ReadonlySet<RelationType>;
  selectedEvents?: ReadonlySet<string>;
}

export function renderView(view: ViewDocument, options: RenderOptions = {}): string {
  const hidden = options.hiddenTypes ?? new Set<RelationType>();
  const selected = options.selectedEvents ?? new Set<string>();
  const relationById = new Map(view.relations.map((r) => [r.id, r]));
  const eventById = new Map(events(view).map((e) => [e.id, e]));
  const parts: string[] = [];

  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${view.layout.width}" ` +
      `height="${view.layout.height}" viewBox="0 0 ${view.layout.width} ${view.layout.height}">`,
  );
  parts.push(markerDefs(view));

  for (const edge of visibleEdges(view, hidden)) {
    const relation = relationById.get(edge.relation_id);
    if (!relation) {
      continue;
    }
    const style = view.style.relations[relation.rel_type];
    if (!style) {
      continue;
    }
    const dash = DASH[style.pattern] ? ` stroke-dasharray="${DASH[style.pattern]}"` : "";
    const marker =
      relation.directed && style.arrowhead !== "none"
        ? ` marker-end="url(#arrow-${relation.rel_type})"`
        : "";
    parts.push(
      `<path class="rel-${relation.rel_type}" data-relation="${relation.id}" ` +
        `d="${pathData(edge)}" fill="none" stroke="${style.color}"` +
        dash +
        marker +
        "/>",
    );
  }

  for (const node of view.layout.nodes) {
    const isEvent = node.node_class === "event";
    const fill = isEvent ? view.style.event_fill : view.style.object_fill;
    const rx = isEvent ? ' rx="8"' : "";
    const selectedClass = selected.has(node.id) ? " selected" : "";
    parts.push(
      `<g class="node ${node.node_class}${selectedClass}" data-id="${node.id}">` +
        `<rect x="${node.x}" y="${node.y}" width="${node.width}" height="${node.height}" ` +
        `fill="${fill}" stroke="#333"${rx}/>` +
        `<text x="${node.x + node.width / 2}" y="${node.y + node.height / 2 + 4}" ` +
        `text-anchor="middle" font-size="11">${escapeXml(nodeLabel(view, eventById.get(node.id), node.id))}</text>` +
        "</g>",
    );
  }

  for (const badge of view.layout.badges) {
    parts.push(
      `<text class="badge" data-event="${badge.event_id}" x="${badge.x}" y="${badge.y}" ` +
        `font-size="11">+${badge.overflow}</text>`,
    );
  }

  parts.push("</svg>");
  return parts.join("\n");
}

function markerDefs(view: ViewDocument): string {
  const defs = Object.entries(view.style.relations)
    .filter(([, style]) => style.arrowhead !== "none")
    .map(
      ([relType, style]) =>
        `<marker id="arrow-${relType}" markerWidth="10" markerHeight="8" refX="9" refY="4" orient="auto">` +
        `<path d="M0,0 L10,4 L0,8 z" fill="${style.arrowhead === "open" ? "none" : style.color}"` +
        (style.arrowhead === "open" ? ` stroke="${style.color}"` : "") +
        "/></marker>",
    );
  return `<defs>${defs.join("")}</defs>`;
}

function pathData(edge: LayoutEdge): string {
  const [first, ...rest] = edge.points;
  if (!first) {
    return "";
  }
  if (edge.arc && edge.points.length === 3) {
    const [mid, end] = rest;
    return `M ${first[0]} ${first[1]} Q ${mid[0]} ${mid[1]} ${end[0]} ${end[1]}`;
  }
  return `M ${first[0]} ${first[1]} ` + rest.map(([x, y]) => `L ${x} ${y}`).join(" ");
}

function nodeLabel(view: ViewDocument, event: Concept | undefined, id: string): string {
  if (event) {
    return event.ordinal != null ? `${event.ordinal}. ${event.title ?? id}` : (event.title ?? id);
  }
  const concept = view.concepts.find((c) => c.id === id);
  if (concept) {
    return concept.name ?? concept.title ?? id;
  }
  const object = view.objects.find((o) => o.id === id);
  return object?.title || id;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
