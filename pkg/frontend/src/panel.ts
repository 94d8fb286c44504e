/** Inspector panel: an event's constitutive objects with evidence
 * words highlighted in the owning relation's color. */

import { findObject, type Evidence, type ViewDocument } from "./types.js";

export interface Highlight {
  start: number;
  end: number;
  surface: string;
  color: string;
}

export interface PanelEntry {
  objectId: string;
  title: string;
  body: string;
  highlights: Highlight[];
}

export function inspectEvent(view: ViewDocument, eventId: string): PanelEntry[] {
  const event = view.concepts.find((c) => c.id === eventId && c.variant === "event");
  if (!event) {
    throw new Error(`unknown event ${eventId}`);
  }
  return (event.constitutive_objects ?? []).map((objectId) => {
    const object = findObject(view, objectId);
    if (!object) {
      throw new Error(`event ${eventId} references unknown object ${objectId}`);
    }
    return {
      objectId,
      title: object.title || objectId,
      body: object.body,
      highlights: highlightsFor(view, objectId, object.body),
    };
  });
}

function highlightsFor(view: ViewDocument, objectId: string, body: string): Highlight[] {
  const highlights: Highlight[] = [];
  for (const relation of view.relations) {
    const color = view.style.relations[relation.rel_type]?.color ?? "#000000";
    for (const evidence of relation.evidence) {
      if (evidence.holder !== objectId || !spanMatches(body, evidence)) {
        continue;
      }
      highlights.push({
        start: evidence.span[0],
        end: evidence.span[1],
        surface: evidence.surface,
        color,
      });
    }
  }
  return highlights.sort((a, b) => a.start - b.start || a.end - b.end);
}

function spanMatches(body: string, evidence: Evidence): boolean {
  const [start, end] = evidence.span;
  return start >= 0 && end <= body.length && body.slice(start, end) === evidence.surface;
}

/** Render a panel entry as HTML with <mark> wrapping the evidence words. */
export function entryHtml(entry: PanelEntry): string {
  let html = `<h3>${escapeHtml(entry.title)}</h3><p>`;
  let cursor = 0;
  for (const h of entry.highlights) {
    if (h.start < cursor) {
      continue; // overlapping evidence: first relation wins
    }
    html += escapeHtml(entry.body.slice(cursor, h.start));
    html += `<mark style="background:${h.color}33;color:${h.color}">${escapeHtml(
      entry.body.slice(h.start, h.end),
    )}</mark>`;
    cursor = h.end;
  }
  html += escapeHtml(entry.body.slice(cursor)) + "</p>";
  return html;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
