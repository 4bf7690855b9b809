import { HttpApi } from "./api.js";
import { attachProbeBanner, renderArticleView } from "./articleView.js";

/**
 * Entry point: render every article of the corpus into #app and kick off
 * a consistency probe per article. Multiple explanation boxes can be in
 * flight at once; each tracks its own job.
 */
async function boot(): Promise<void> {
  const api = new HttpApi("");
  const app = document.getElementById("app");
  if (app === null) return;
  const names = await api.listArticles();
  for (const name of names) {
    const section = document.createElement("section");
    app.append(section);
    const article = await api.getArticle(name);
    renderArticleView(api, article, section);
    void attachProbeBanner(api, name, section).catch(() => undefined);
  }
}

void boot();
