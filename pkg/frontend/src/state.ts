/** Session state: relation-type toggles, event selection, and the
 * merge/undo flow. All chronology mutations go through the service;
 * undo replays the pre-merge document under the merge's version tag. */

import type { ApiClient } from "./api.js";
import {
  RELATION_TYPES,
  type ChronologyDocument,
  type RelationType,
  type ViewDocument,
  events,
} from "./types.js";

export interface Snapshot {
  document: ChronologyDocument;
  etag: string;
}

export interface ViewState {
  chronologyId: string;
  hiddenTypes: ReadonlySet<RelationType>;
  selectedEvents: readonly string[];
  view: ViewDocument | null;
  etag: string | null;
  undoStack: readonly Snapshot[];
}

export function initialState(chronologyId: string): ViewState {
  return {
    chronologyId,
    hiddenTypes: new Set(),
    selectedEvents: [],
    view: null,
    etag: null,
    undoStack: [],
  };
}

export function includedTypes(state: ViewState): RelationType[] {
  return RELATION_TYPES.filter((t) => !state.hiddenTypes.has(t));
}

export function isValidType(value: string): value is RelationType {
  return (RELATION_TYPES as readonly string[]).includes(value);
}

/** Flip one relation type's visibility and re-request the view. */
export async function toggleRelationType(
  api: ApiClient,
  state: ViewState,
  relType: RelationType,
): Promise<ViewState> {
  if (!isValidType(relType)) {
    throw new Error(`unknown relation type ${relType}`);
  }
  const hidden = new Set(state.hiddenTypes);
  if (hidden.has(relType)) {
    hidden.delete(relType);
  } else {
    hidden.add(relType);
  }
  const next: ViewState = { ...state, hiddenTypes: hidden };
  const { document, etag } = await api.getView(state.chronologyId, {
    includedTypes: hidden.size ? includedTypes(next) : undefined,
  });
  const visible = new Set(events(document).map((e) => e.id));
  return {
    ...next,
    view: document,
    etag,
    selectedEvents: next.selectedEvents.filter((id) => visible.has(id)),
  };
}

export async function refresh(api: ApiClient, state: ViewState): Promise<ViewState> {
  const { document, etag } = await api.getView(state.chronologyId, {
    includedTypes: state.hiddenTypes.size ? includedTypes(state) : undefined,
  });
  return { ...state, view: document, etag };
}

export function selectEvent(state: ViewState, eventId: string): ViewState {
  if (state.view && !events(state.view).some((e) => e.id === eventId)) {
    throw new Error(`unknown event ${eventId}`);
  }
  if (state.selectedEvents.includes(eventId)) {
    return { ...state, selectedEvents: state.selectedEvents.filter((id) => id !== eventId) };
  }
  return { ...state, selectedEvents: [...state.selectedEvents, eventId] };
}

export function canMerge(state: ViewState): boolean {
  return state.selectedEvents.length >= 2;
}

/** Merge the selected events; keeps a snapshot so the merge can be undone. */
export async function mergeSelection(api: ApiClient, state: ViewState): Promise<ViewState> {
  if (!canMerge(state)) {
    throw new Error("select at least two events to merge");
  }
  const before = await api.getChronology(state.chronologyId);
  await api.mergeEvents(state.chronologyId, [...state.selectedEvents]);
  const refreshed = await refresh(api, { ...state, selectedEvents: [] });
  return { ...refreshed, undoStack: [...state.undoStack, before] };
}

/** Restore the most recent snapshot by writing it back under the current tag. */
export async function undo(api: ApiClient, state: ViewState): Promise<ViewState> {
  const snapshot = state.undoStack[state.undoStack.length - 1];
  if (!snapshot) {
    throw new Error("nothing to undo");
  }
  const current = await api.getChronology(state.chronologyId);
  await api.putChronology(state.chronologyId, snapshot.document, current.etag);
  const refreshed = await refresh(api, state);
  return { ...refreshed, undoStack: state.undoStack.slice(0, -1) };
}

/** Relations currently drawn, honouring the toggle set (service-filtered
 * views already exclude them; this also covers locally cached views). */
export function visibleRelations(view: ViewDocument, hidden: ReadonlySet<RelationType>) {
  return view.relations.filter((r) => !hidden.has(r.rel_type));
}

export function visibleEdges(view: ViewDocument, hidden: ReadonlySet<RelationType>) {
  const keep = new Set(visibleRelations(view, hidden).map((r) => r.id));
  return view.layout.edges.filter((e) => keep.has(e.relation_id));
}
