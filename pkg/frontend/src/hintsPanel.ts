import type { Api, HintJson } from "./api.js";
import { anchorId, el } from "./dom.js";
import { requestSolveAndShow } from "./explainBox.js";

/**
 * Ranked premise suggestions with links to their definition sites. Each
 * hint can be added to a draft by-list (kept purely client-side) and the
 * draft re-solved in explicit-references mode.
 */
export async function showHints(
  api: Api,
  article: string,
  label: string,
  k: number,
  container: HTMLElement,
): Promise<void> {
  container.textContent = "";
  container.classList.add("hints-panel");
  let hints: HintJson[];
  try {
    hints = await api.hints(article, label, k);
  } catch (err) {
    container.append(el("div", { class: "error" }, `hints failed: ${String(err)}`));
    return;
  }
  const draft: string[] = [];
  const draftView = el("code", { class: "draft-by" }, ";");
  const scoreSpread = new Set(hints.map((h) => h.score.toFixed(9))).size;
  if (scoreSpread <= 1 && hints.length > 1) {
    container.append(
      el("div", { class: "cold-model" }, "untrained model: alphabetical order only"),
    );
  }
  const list = el("ol", { class: "hints" });
  for (const hint of hints) {
    const link = el(
      "a",
      { href: `#${anchorId(hint.article, hint.label)}`, "data-ref": hint.fact },
      hint.fact,
    );
    const add = el("button", { class: "add-hint" }, "+") as HTMLButtonElement;
    add.onclick = () => {
      if (!draft.includes(hint.fact)) draft.push(hint.fact);
      draftView.textContent = draft.length ? `by ${draft.join(", ")};` : ";";
    };
    list.append(el("li", {}, link, ` (${hint.score.toFixed(4)}) `, add));
  }
  const resolve = el("button", { class: "resolve-draft" }, "re-solve with draft") as HTMLButtonElement;
  const resultSlot = el("div", { class: "draft-result" });
  resolve.onclick = () => {
    void requestSolveAndShow(api, article, label, "by", resultSlot, 1000, [...draft]);
  };
  container.append(list, el("div", {}, "draft: ", draftView, " ", resolve), resultSlot);
}
