import { beforeEach, describe, expect, it } from "vitest";

import type { ArticleJson } from "../src/api.js";
import { attachProbeBanner, renderArticleView } from "../src/articleView.js";
import { FixtureApi, loadFixture } from "./fixtureApi.js";

describe("article view", () => {
  let api: FixtureApi;
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "<div id='root'></div>";
    root = document.getElementById("root")!;
    api = new FixtureApi();
  });

  async function renderCorpus(): Promise<void> {
    for (const name of await api.listArticles()) {
      const section = document.createElement("section");
      root.append(section);
      renderArticleView(api, loadFixture<ArticleJson>(`article_${name}`), section);
    }
  }

  it("renders one row per fact with anchors and badges", async () => {
    renderArticleView(api, loadFixture<ArticleJson>("article_graphs"), root);
    const article = loadFixture<ArticleJson>("article_graphs");
    expect(root.querySelectorAll(".fact-row").length).toBe(article.facts.length);
    expect(document.getElementById("fact-graphs-g_sub3")).not.toBeNull();
    const role = root.querySelector("#fact-graphs-vertices_def .role-badge")!;
    expect(role.textContent).toBe("definition");
  });

  it("flags assumed facts visibly", async () => {
    renderArticleView(api, loadFixture<ArticleJson>("article_graphs"), root);
    const chip = root.querySelector("#fact-graphs-sg1 .status-chip")!;
    expect(chip.classList.contains("flagged")).toBe(true);
    expect(chip.textContent).toBe("assumed");
  });

  it("crawls the rendered corpus without dead reference links", async () => {
    await renderCorpus();
    const links = [...root.querySelectorAll<HTMLAnchorElement>("a[data-ref]")];
    expect(links.length).toBeGreaterThan(30);
    const dead = links
      .map((a) => a.getAttribute("href")!)
      .filter((href) => href.startsWith("#"))
      .filter((href) => document.getElementById(href.slice(1)) === null);
    expect(dead).toEqual([]);
  });

  it("shows an inconsistency banner naming the assumed fact", async () => {
    const section = document.createElement("section");
    root.append(section);
    renderArticleView(api, loadFixture<ArticleJson>("article_graphs"), section);
    api.probeQueue = ["probe_graphs_buggy"];
    await attachProbeBanner(api, "graphs", section, 1);
    const banner = section.querySelector<HTMLElement>(".probe-banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("graphs:sg1");
  });

  it("keeps the banner hidden on a clean probe", async () => {
    const section = document.createElement("section");
    root.append(section);
    renderArticleView(api, loadFixture<ArticleJson>("article_graphs"), section);
    api.probeQueue = ["probe_graphs_clean"];
    await attachProbeBanner(api, "graphs", section, 1);
    expect(section.querySelector<HTMLElement>(".probe-banner")!.hidden).toBe(true);
  });

  it("clicking by opens an explanation box tied to that row", async () => {
    api.solveQueue = ["solve_g_sub3_done"];
    renderArticleView(api, loadFixture<ArticleJson>("article_graphs"), root);
    const row = root.querySelector("#fact-graphs-g_sub3")!;
    (row.querySelector(".by-keyword") as HTMLAnchorElement).click();
    await new Promise((resolve) => setTimeout(resolve, 5));
    expect(row.querySelector(".explain-slot .by-clause")!.textContent).toBe(
      "by g_vertex_intro, g_sub3_c, g_sub3_d, g_sub3_e;",
    );
    expect(api.solveRequests[0]).toMatchObject({
      article: "graphs",
      label: "g_sub3",
      mode: "by",
    });
  });
});
