/** Browser wiring: toolbar toggles, event selection, inspector panel,
 * merge and undo buttons. All state transitions live in state.ts so
 * they stay testable without a DOM. */

import { ApiClient } from "./api.js";
import { entryHtml, inspectEvent } from "./panel.js";
import { renderView } from "./render.js";
import {
  canMerge,
  initialState,
  mergeSelection,
  refresh,
  selectEvent,
  toggleRelationType,
  undo,
  type ViewState,
} from "./state.js";
import { RELATION_TYPES } from "./types.js";

async function boot(root: Document): Promise<void> {
  const api = new ApiClient("");
  const params = new URLSearchParams(root.defaultView?.location.search ?? "");
  let state = await refresh(api, initialState(params.get("chronology") ?? "childcare-benefits"));

  const diagram = root.getElementById("diagram")!;
  const panel = root.getElementById("panel")!;
  const toolbar = root.getElementById("toolbar")!;
  const mergeButton = root.getElementById("merge") as HTMLButtonElement;
  const undoButton = root.getElementById("undo") as HTMLButtonElement;

  for (const relType of RELATION_TYPES) {
    const label = root.createElement("label");
    const box = root.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.addEventListener("change", () => {
      void apply(toggleRelationType(api, state, relType));
    });
    label.append(box, ` ${relType}`);
    toolbar.append(label);
  }

  mergeButton.addEventListener("click", () => {
    void apply(mergeSelection(api, state));
  });
  undoButton.addEventListener("click", () => {
    void apply(undo(api, state));
  });

  diagram.addEventListener("click", (event) => {
    const node = (event.target as Element).closest(".node.event");
    const id = node?.getAttribute("data-id");
    if (id) {
      state = selectEvent(state, id);
      showPanel();
      draw();
    }
  });

  async function apply(next: Promise<ViewState>): Promise<void> {
    try {
      state = await next;
    } catch (error) {
      panel.textContent = String(error);
      return;
    }
    showPanel();
    draw();
  }

  function draw(): void {
    if (!state.view) {
      return;
    }
    diagram.innerHTML = renderView(state.view, {
      hiddenTypes: state.hiddenTypes,
      selectedEvents: new Set(state.selectedEvents),
    });
    mergeButton.disabled = !canMerge(state);
    undoButton.disabled = state.undoStack.length === 0;
  }

  function showPanel(): void {
    const focused = state.selectedEvents[state.selectedEvents.length - 1];
    if (!focused || !state.view) {
      panel.innerHTML = "";
      return;
    }
    panel.innerHTML = inspectEvent(state.view, focused).map(entryHtml).join("");
  }

  draw();
}

declare const document: Document | undefined;

if (typeof document !== "undefined" && document.getElementById("diagram")) {
  void boot(document);
}

export { boot };
