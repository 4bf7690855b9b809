import type { Api, ArticleJson, FactJson, ProbeResultJson } from "./api.js";
import { anchorId, el } from "./dom.js";
import { requestSolveAndShow } from "./explainBox.js";
import { showHints } from "./hintsPanel.js";
import { pollJob } from "./poll.js";

/**
 * One row per fact: label anchor, role badge, formula, justification
 * widget (clickable `by`), and a status chip. Assumed and unjustified
 * facts get a visible warning flag; cross-references are links to the
 * target fact's anchor.
 */
export function renderArticleView(
  api: Api,
  article: ArticleJson,
  container: HTMLElement,
): void {
  container.textContent = "";
  const header = el("h2", { id: `article-${article.article}` }, article.article);
  container.append(header);
  if (article.imports.length) {
    container.append(
      el("div", { class: "imports" }, `imports: ${article.imports.join(", ")}`),
    );
  }
  const banner = el("div", { class: "probe-banner", hidden: "hidden" });
  container.append(banner);

  const table = el("div", { class: "facts" });
  for (const fact of article.facts) {
    table.append(renderFactRow(api, article.article, fact));
  }
  container.append(table);
}

function renderFactRow(api: Api, article: string, fact: FactJson): HTMLElement {
  const row = el("div", { class: `fact-row role-${fact.role}`, id: anchorId(article, fact.label) });
  row.append(
    el("a", { class: "label", href: `#${anchorId(article, fact.label)}` }, fact.label),
    el("span", { class: "role-badge" }, fact.role),
    el("code", { class: "formula" }, fact.formula),
  );
  const chip = el("span", { class: `status-chip status-${fact.status}` }, fact.status);
  if (fact.status !== "accepted") {
    chip.classList.add("flagged");
    chip.title = "unproven statement taken on trust";
  }
  row.append(chip);

  const widget = el("span", { class: "justification" });
  const box = el("div", { class: "explain-slot" });
  if (fact.justification?.kind === "by") {
    const by = el("a", { class: "by-keyword", href: "#" }, "by") as HTMLAnchorElement;
    by.onclick = (event) => {
      event.preventDefault();
      void requestSolveAndShow(api, article, fact.label, "by", box);
    };
    widget.append(by, " ");
    const refs = fact.justification.refs ?? [];
    refs.forEach((ref, i) => {
      if (i > 0) widget.append(", ");
      const text = ref.local ? ref.label : `${ref.article}:${ref.label}`;
      widget.append(
        el(
          "a",
          { href: `#${anchorId(ref.article, ref.label)}`, "data-ref": `${ref.article}:${ref.label}` },
          text,
        ),
      );
    });
    widget.append(";");
  } else if (fact.justification?.kind === "assumed") {
    widget.append(el("em", { class: "assumed-marker" }, "assumed"));
    const hintIt = el("a", { class: "hints-link", href: "#" }, "Suggest hints") as HTMLAnchorElement;
    hintIt.onclick = (event) => {
      event.preventDefault();
      void showHints(api, article, fact.label, 10, box);
    };
    widget.append(" ", hintIt);
  }
  row.append(widget, box);
  return row;
}

/** Run the consistency probe and surface any warning as a banner. */
export async function attachProbeBanner(
  api: Api,
  article: string,
  container: HTMLElement,
  pollIntervalMs = 1000,
): Promise<void> {
  const banner = container.querySelector<HTMLElement>(".probe-banner");
  if (banner === null) return;
  const jobId = await api.submitProbe(article);
  const job = await pollJob(api, jobId, pollIntervalMs).done;
  const result = job.result as ProbeResultJson | null;
  if (!result || result.warnings.length === 0) return;
  banner.hidden = false;
  banner.classList.add("inconsistent");
  for (const warning of result.warnings) {
    banner.append(
      el(
        "div",
        {},
        `inconsistency before ${warning.before_label}: derived from `,
        ...warning.assumed_used.map((fid) =>
          el("a", { href: `#${anchorId(...splitId(fid))}`, "data-ref": fid }, fid),
        ),
      ),
    );
  }
}

function splitId(factId: string): [string, string] {
  const i = factId.indexOf(":");
  return [factId.slice(0, i), factId.slice(i + 1)];
}
