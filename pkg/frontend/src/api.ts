import type {
  ApiErrorBody,
  DocumentPayload,
  PaperInfo,
  ProjectDetails,
  QuestionInfo,
  QuestionPagePayload,
  RefreshResponse,
  StateInfo,
  SuggestionCard,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly machineCode: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly token: string | null = null,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(`${this.baseUrl}/api/v1${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail: ApiErrorBody = { machine_code: "unknown", message: response.statusText };
      try {
        detail = (await response.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail.machine_code, detail.message);
    }
    return (await response.json()) as T;
  }

  listProjects(): Promise<ProjectDetails[]> {
    return this.request("GET", "/projects");
  }

  getProject(projectId: string): Promise<ProjectDetails> {
    return this.request("GET", `/projects/${projectId}`);
  }

  getSuggestions(projectId: string, sinceRun?: string): Promise<SuggestionCard[]> {
    const query = sinceRun ? `?since_run=${encodeURIComponent(sinceRun)}` : "";
    return this.request("GET", `/projects/${projectId}/suggestions${query}`);
  }

  getDocument(projectId: string, revision?: number): Promise<DocumentPayload> {
    const query = revision === undefined ? "" : `?revision=${revision}`;
    return this.request("GET", `/projects/${projectId}/document${query}`);
  }

  getQuestions(projectId: string): Promise<QuestionInfo[]> {
    return this.request("GET", `/projects/${projectId}/questions`);
  }

  addQuestion(projectId: string, text: string): Promise<QuestionInfo> {
    return this.request("POST", `/projects/${projectId}/questions`, { text });
  }

  getQuestion(questionId: string): Promise<QuestionPagePayload> {
    return this.request("GET", `/questions/${questionId}`);
  }

  setTracked(questionId: string, tracked: boolean): Promise<QuestionInfo> {
    return this.request("POST", `/questions/${questionId}/track`, { tracked });
  }

  overrideState(projectId: string, label: string): Promise<StateInfo & { state_label: string }> {
    return this.request("PATCH", `/projects/${projectId}/state`, { label });
  }

  clearStateOverride(projectId: string): Promise<(StateInfo & { state_label: string }) | null> {
    return this.request("PATCH", `/projects/${projectId}/state`, { clear_override: true });
  }

  getPapers(projectId: string): Promise<PaperInfo[]> {
    return this.request("GET", `/projects/${projectId}/papers`);
  }

  editPaperRelation(paperId: string, relation: string): Promise<PaperInfo> {
    return this.request("PATCH", `/papers/${encodeURIComponent(paperId)}`, { relation });
  }

  removePaper(paperId: string): Promise<PaperInfo> {
    return this.request("DELETE", `/papers/${encodeURIComponent(paperId)}`);
  }

  setFrequency(projectId: string, frequency: string): Promise<ProjectDetails> {
    return this.request("PATCH", `/projects/${projectId}/settings`, { frequency });
  }

  refresh(projectId: string): Promise<RefreshResponse> {
    return this.request("POST", `/projects/${projectId}/refresh`);
  }
}
