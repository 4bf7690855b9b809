/**
 * Typed client for the deskhammer HTTP API.
 *
 * Components depend on the Api interface, not on fetch, so tests can run
 * them against recorded fixtures.
 */

export interface FactRefJson {
  article: string;
  label: string;
  local: boolean;
}

export interface JustificationJson {
  kind: "by" | "assumed";
  refs?: FactRefJson[];
}

export interface FactJson {
  label: string;
  role: string;
  formula: string;
  status: "accepted" | "assumed" | "unjustified";
  justification: JustificationJson | null;
}

export interface ArticleJson {
  schema_version: string;
  article: string;
  imports: string[];
  facts: FactJson[];
}

export interface StrategyOutcomeJson {
  strategy: string;
  status: string;
  elapsed_ms: number;
  used: string[];
  premise_count: number;
}

export interface SolveResultJson {
  status: string;
  winner: string | null;
  used: string[];
  by_clause: string | null;
  outcomes: StrategyOutcomeJson[];
  goal: string;
}

export interface JobJson {
  schema_version: string;
  id: string;
  kind: string;
  state: "queued" | "running" | "done" | "cancelled";
  result: SolveResultJson | ProbeResultJson | null;
  error: string | null;
}

export interface HintJson {
  fact: string;
  score: number;
  article: string;
  label: string;
}

export interface ProbeWarningJson {
  article: string;
  before_label: string;
  used: string[];
  assumed_used: string[];
}

export interface ProbeResultJson {
  article: string;
  warnings: ProbeWarningJson[];
  report: string;
}

export interface SolveRequest {
  article: string;
  label: string;
  mode?: string;
  timeout_ms?: number;
  refs?: string[]; // explicit premise references (draft by-list)
}

export interface Api {
  listArticles(): Promise<string[]>;
  getArticle(name: string): Promise<ArticleJson>;
  submitSolve(request: SolveRequest): Promise<string>;
  getJob(id: string): Promise<JobJson>;
  cancelJob(id: string): Promise<void>;
  hints(article: string, label: string, k: number): Promise<HintJson[]>;
  submitProbe(article: string): Promise<string>;
  problemUrl(article: string, label: string, mode: string): string;
}

export class HttpApi implements Api {
  constructor(private readonly base: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      const detail = await response.text();
      throw new Error(`${response.status} ${path}: ${detail}`);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  async listArticles(): Promise<string[]> {
    const payload = await this.json<{ articles: string[] }>("/articles");
    return payload.articles;
  }

  getArticle(name: string): Promise<ArticleJson> {
    return this.json<ArticleJson>(`/articles/${name}`);
  }

  async submitSolve(request: SolveRequest): Promise<string> {
    const payload = await this.post<{ job_id: string }>("/solve", request);
    return payload.job_id;
  }

  getJob(id: string): Promise<JobJson> {
    return this.json<JobJson>(`/jobs/${id}`);
  }

  async cancelJob(id: string): Promise<void> {
    await this.post(`/jobs/${id}/cancel`);
  }

  async hints(article: string, label: string, k: number): Promise<HintJson[]> {
    const payload = await this.post<{ hints: HintJson[] }>("/hints", {
      article,
      label,
      k,
    });
    return payload.hints;
  }

  async submitProbe(article: string): Promise<string> {
    const payload = await this.post<{ job_id: string }>(`/probe/${article}`);
    return payload.job_id;
  }

  problemUrl(article: string, label: string, mode: string): string {
    return `${this.base}/problem/${article}/${label}?mode=${mode}`;
  }
}
