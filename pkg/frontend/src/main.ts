// Page bootstrap: session form, mixing slider, undo/hint/pool buttons.

import { ExplorerClient } from "./api.js";
import { SessionController } from "./controller.js";
import { render } from "./render.js";
import { ViewState } from "./state.js";

const DEFAULT_INSTANCE = {
  vertices: [
    { id: "1", level: "0" },
    { id: "2", level: "1" },
    { id: "3", level: "0" },
  ],
  edges: [
    ["1", "2"],
    ["2", "3"],
  ],
};

export function mount(root: HTMLElement, baseUrl: string): SessionController {
  const view = new ViewState();
  const client = new ExplorerClient(baseUrl);

  const form = document.createElement("div");
  form.className = "session-form";
  const instanceInput = document.createElement("textarea");
  instanceInput.value = JSON.stringify(DEFAULT_INSTANCE, null, 1);
  instanceInput.rows = 8;
  const targetInput = document.createElement("input");
  targetInput.value = "1";
  const startButton = document.createElement("button");
  startButton.textContent = "start session";

  const muSlider = document.createElement("input");
  muSlider.type = "range";
  muSlider.min = "0";
  muSlider.max = "8";
  muSlider.value = "8";
  const muLabel = document.createElement("span");
  const muString = () => (muSlider.value === "8" ? "1/2" : `${muSlider.value}/16`);
  const syncMu = () => (muLabel.textContent = `μ = ${muString()}`);
  muSlider.addEventListener("input", syncMu);
  syncMu();

  const undoButton = document.createElement("button");
  undoButton.textContent = "undo";
  const hintButton = document.createElement("button");
  hintButton.textContent = "hint";
  const poolButton = document.createElement("button");
  poolButton.textContent = "pool selection";
  const clearButton = document.createElement("button");
  clearButton.textContent = "clear selection";

  const board = document.createElement("div");
  board.className = "board";

  const controller = new SessionController(client, view, () => {
    undoButton.disabled = view.pending || view.history.length === 0;
    poolButton.disabled = view.pending;
    render(board, view, {
      onEdgeClick: (a, b) => void controller.clickEdge(a, b, muString()),
      onVertexClick: (id) => {
        view.toggleSelected(id);
        view.error = null;
        render(board, view, {});
      },
    });
  });

  startButton.addEventListener("click", () => {
    try {
      const instance = JSON.parse(instanceInput.value);
      void controller.start(instance, targetInput.value.trim());
    } catch (err) {
      view.error = `instance is not valid JSON: ${err}`;
    }
  });
  undoButton.addEventListener("click", () => void controller.undo());
  hintButton.addEventListener("click", () => void controller.requestHint());
  poolButton.addEventListener("click", () => void controller.poolSelection(muString()));
  clearButton.addEventListener("click", () => {
    view.clearSelection();
    controller.refresh();
  });

  form.append(instanceInput, targetInput, startButton, muSlider, muLabel, undoButton, hintButton, poolButton, clearButton);
  root.append(form, board);
  return controller;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app")!, "");
}
