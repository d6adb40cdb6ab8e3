import { ApiClient, ApiError } from "./api.js";
import { renderDashboard } from "./dashboard.js";
import { clear, el, toast } from "./dom.js";
import { renderDocumentView } from "./documentView.js";
import { renderProjectDetails } from "./projectDetails.js";
import { renderQuestionList, renderQuestionPage } from "./questionPage.js";
import type { SuggestionCard } from "./types.js";

// Hash routes:
//   #/                                project list
//   #/projects/{id}                   dashboard
//   #/projects/{id}/document[?s=sid]  document view
//   #/projects/{id}/questions         question list
//   #/projects/{id}/details           project details
//   #/questions/{qid}                 question page

export class App {
  constructor(
    private readonly api: ApiClient,
    private readonly container: HTMLElement,
    private readonly navigate: (hash: string) => void = (hash) => {
      window.location.hash = hash;
    },
  ) {}

  async route(hash: string): Promise<void> {
    const [path, queryString] = hash.replace(/^#/, "").split("?");
    const query = new URLSearchParams(queryString ?? "");
    const parts = path.split("/").filter(Boolean);
    try {
      if (parts.length === 0) return await this.showProjectList();
      if (parts[0] === "projects" && parts.length === 2) {
        return await this.showDashboard(parts[1]);
      }
      if (parts[0] === "projects" && parts[2] === "document") {
        return await this.showDocument(parts[1], query.get("s"));
      }
      if (parts[0] === "projects" && parts[2] === "questions") {
        return await this.showQuestionList(parts[1]);
      }
      if (parts[0] === "projects" && parts[2] === "details") {
        return await this.showDetails(parts[1]);
      }
      if (parts[0] === "questions" && parts.length === 2) {
        return await this.showQuestion(parts[1]);
      }
      this.renderError(`Unknown page: ${path}`);
    } catch (error) {
      this.renderError(error instanceof Error ? error.message : String(error));
    }
  }

  private renderError(message: string): void {
    clear(this.container);
    this.container.append(el("div", { class: "error-banner" }, message));
  }

  private nav(project: string | null): HTMLElement {
    const links: [string, string][] = [["#/", "Projects"]];
    if (project) {
      links.push(
        [`#/projects/${project}`, "Dashboard"],
        [`#/projects/${project}/document`, "Document"],
        [`#/projects/${project}/questions`, "Questions"],
        [`#/projects/${project}/details`, "Project details"],
      );
    }
    return el(
      "nav",
      {},
      ...links.map(([hash, label]) =>
        el("a", { href: hash, class: "nav-link" }, label),
      ),
    );
  }

  private page(project: string | null): HTMLElement {
    clear(this.container);
    this.container.append(this.nav(project));
    const content = el("main", { class: "content" });
    this.container.append(content);
    return content;
  }

  async showProjectList(): Promise<void> {
    const projects = await this.api.listProjects();
    const content = this.page(null);
    content.append(el("h2", {}, "Projects"));
    const list = el("ul", { class: "project-list" });
    for (const project of projects) {
      list.append(
        el("li", {},
          el("a", { href: `#/projects/${project.project_id}` }, project.name),
          el("span", { class: "meta" },
            ` ${project.state?.label ?? "not assessed"} · ${project.frequency}`),
        ),
      );
    }
    content.append(list);
  }

  async showDashboard(projectId: string): Promise<void> {
    const [project, cards] = await Promise.all([
      this.api.getProject(projectId),
      this.api.getSuggestions(projectId),
    ]);
    const content = this.page(projectId);
    renderDashboard(content, project.name, cards, {
      onViewContext: (card: SuggestionCard) =>
        this.navigate(`#/projects/${projectId}/document?s=${card.suggestion_id}`),
      onOpenQuestion: (card: SuggestionCard) =>
        this.navigate(`#/questions/${card.question_id}`),
    });
  }

  async showDocument(projectId: string, selectedSuggestionId: string | null): Promise<void> {
    const [doc, cards] = await Promise.all([
      this.api.getDocument(projectId),
      this.api.getSuggestions(projectId),
    ]);
    const content = this.page(projectId);
    renderDocumentView(content, doc, cards, selectedSuggestionId);
  }

  async showQuestionList(projectId: string): Promise<void> {
    const questions = await this.api.getQuestions(projectId);
    const content = this.page(projectId);
    renderQuestionList(content, questions, {
      onAddQuestion: async (text) => {
        try {
          await this.api.addQuestion(projectId, text);
        } catch (error) {
          this.toastError(error);
          return;
        }
        await this.showQuestionList(projectId);
      },
      onOpenQuestion: (questionId) => this.navigate(`#/questions/${questionId}`),
    });
  }

  async showQuestion(questionId: string): Promise<void> {
    const payload = await this.api.getQuestion(questionId);
    const content = this.page(payload.project_id);
    renderQuestionPage(content, payload, {
      onToggleTrack: async (qid, tracked) => {
        try {
          await this.api.setTracked(qid, tracked);
        } catch (error) {
          this.toastError(error);
          return;
        }
        await this.showQuestion(qid);
      },
      onOpenSuggestionContext: (card) =>
        this.navigate(`#/projects/${payload.project_id}/document?s=${card.suggestion_id}`),
    });
  }

  async showDetails(projectId: string): Promise<void> {
    const [project, papers, questions] = await Promise.all([
      this.api.getProject(projectId),
      this.api.getPapers(projectId),
      this.api.getQuestions(projectId),
    ]);
    const content = this.page(projectId);
    renderProjectDetails(content, project, papers, questions, {
      onOverrideState: async (label) => {
        await this.api.overrideState(projectId, label);
        await this.showDetails(projectId);
      },
      onClearOverride: async () => {
        await this.api.clearStateOverride(projectId);
        await this.showDetails(projectId);
      },
      onEditRelation: async (paperId, relation) => {
        await this.api.editPaperRelation(paperId, relation);
        await this.showDetails(projectId);
      },
      onRemovePaper: async (paperId) => {
        await this.api.removePaper(paperId);
        await this.showDetails(projectId);
      },
      onSetFrequency: async (frequency) => {
        await this.api.setFrequency(projectId, frequency);
        await this.showDetails(projectId);
      },
      onManualRefresh: async () => {
        try {
          const response = await this.api.refresh(projectId);
          toast(`Update ${response.run_id ?? ""} ${response.status}`.trim());
        } catch (error) {
          this.toastError(error);
          return;
        }
        await this.showDetails(projectId);
      },
      onOpenQuestion: (questionId) => this.navigate(`#/questions/${questionId}`),
    });
  }

  private toastError(error: unknown): void {
    if (error instanceof ApiError && error.machineCode === "busy") {
      toast("An update is already running for this project.");
    } else if (error instanceof ApiError) {
      toast(`${error.machineCode}: ${error.message}`);
    } else {
      toast(String(error));
    }
  }
}
