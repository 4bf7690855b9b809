import type { Api, JobJson, SolveResultJson } from "./api.js";
import { anchorId, el } from "./dom.js";
import { showHints } from "./hintsPanel.js";
import { pollJob } from "./poll.js";

/**
 * Solve one inference and render the explanation box: status, winning
 * strategy, used references as links, the post-edited by-clause with a
 * copy action, and a problem-export link. A failed solve shows "Unsolved"
 * with per-strategy verdicts and a hints call-to-action.
 */
export function requestSolveAndShow(
  api: Api,
  article: string,
  label: string,
  mode: string | undefined,
  container: HTMLElement,
  pollIntervalMs = 1000,
  refs?: string[],
): Promise<void> {
  container.textContent = "";
  container.classList.add("explain-box");
  const status = el("div", { class: "explain-status" }, "ATP asked ...");
  const cancelButton = el("button", { class: "cancel" }, "cancel") as HTMLButtonElement;
  container.append(status, cancelButton);

  return (async () => {
    let jobId: string;
    try {
      jobId = await api.submitSolve({ article, label, mode, refs });
    } catch (err) {
      status.textContent = `error: ${String(err)}`;
      cancelButton.remove();
      return;
    }
    const handle = pollJob(api, jobId, pollIntervalMs, (job: JobJson) => {
      status.textContent = `ATP asked ... (${job.state})`;
    });
    cancelButton.onclick = () => handle.cancel();
    let job: JobJson;
    try {
      job = await handle.done;
    } catch (err) {
      status.textContent = `error: ${String(err)}`;
      cancelButton.remove();
      return;
    }
    cancelButton.remove();
    if (job.state === "cancelled") {
      status.textContent = "cancelled";
      return;
    }
    if (job.error !== null) {
      status.textContent = `error: ${job.error}`;
      return;
    }
    renderSolveResult(api, article, label, job.result as SolveResultJson, container, status);
  })();
}

function renderSolveResult(
  api: Api,
  article: string,
  label: string,
  result: SolveResultJson,
  container: HTMLElement,
  status: HTMLElement,
): void {
  if (result.status === "Theorem") {
    status.textContent = `Theorem (strategy: ${result.winner})`;
    const list = el("ul", { class: "used-refs" });
    for (const used of result.used) {
      const [refArticle, refLabel] = used.split(":", 2);
      const link = el(
        "a",
        { href: `#${anchorId(refArticle, refLabel)}`, "data-ref": used },
        used,
      );
      list.append(el("li", {}, link));
    }
    const clause = el("code", { class: "by-clause" }, result.by_clause ?? ";");
    const copy = el("button", { class: "copy" }, "copy") as HTMLButtonElement;
    copy.onclick = () => {
      void navigator.clipboard?.writeText(result.by_clause ?? ";");
    };
    const exportLink = el(
      "a",
      { href: api.problemUrl(article, label, "by"), class: "export" },
      "inspect the ATP problem",
    );
    container.append(
      el("div", { class: "refs-title" }, "references used:"),
      list,
      el("div", { class: "edited" }, "edited: ", clause, " ", copy),
      exportLink,
    );
    return;
  }

  status.textContent = `${label}: ... Unsolved`;
  status.classList.add("unsolved");
  const verdicts = el("ul", { class: "verdicts" });
  for (const outcome of result.outcomes) {
    verdicts.append(
      el(
        "li",
        {},
        `[${outcome.strategy}] ${outcome.status} (${outcome.elapsed_ms.toFixed(0)}ms)`,
      ),
    );
  }
  const hintsButton = el("button", { class: "suggest-hints" }, "Suggest hints") as HTMLButtonElement;
  const hintsSlot = el("div", { class: "hints-slot" });
  hintsButton.onclick = () => {
    void showHints(api, article, label, 10, hintsSlot);
  };
  container.append(verdicts, hintsButton, hintsSlot);
}
