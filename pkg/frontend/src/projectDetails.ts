import { clear, el } from "./dom.js";
import type { PaperInfo, ProjectDetails, QuestionInfo } from "./types.js";

export interface ProjectDetailsHandlers {
  onOverrideState(label: string): Promise<void>;
  onClearOverride(): Promise<void>;
  onEditRelation(paperId: string, relation: string): Promise<void>;
  onRemovePaper(paperId: string): Promise<void>;
  onSetFrequency(frequency: string): Promise<void>;
  onManualRefresh(): Promise<void>;
  onOpenQuestion(questionId: string): void;
}

const FREQUENCIES = ["daily", "every_2_days", "weekly", "biweekly", "never"];

function stateSection(project: ProjectDetails, handlers: ProjectDetailsHandlers): HTMLElement {
  const state = project.state;
  const labelInput = el("input", {
    class: "state-input",
    type: "text",
    value: state?.label ?? "",
  }) as HTMLInputElement;
  return el(
    "section",
    { class: "state-section" },
    el("h3", {}, "Project state"),
    el("p", { class: "state-badge", "data-overridden": String(state?.user_overridden ?? false) },
      state ? state.label : "not assessed yet",
      state?.user_overridden ? el("span", { class: "override-marker" }, " (your override)") : null,
    ),
    state?.rationale ? el("p", { class: "state-rationale" }, state.rationale) : null,
    el("div", { class: "state-edit" },
      labelInput,
      el("button", {
        class: "apply-override",
        onclick: async () => {
          const label = labelInput.value.trim();
          if (label) await handlers.onOverrideState(label);
        },
      }, "Override state"),
      state?.user_overridden
        ? el("button", { class: "clear-override", onclick: () => handlers.onClearOverride() },
            "Clear override (re-infer next run)")
        : null,
    ),
  );
}

function papersSection(papers: PaperInfo[], handlers: ProjectDetailsHandlers): HTMLElement {
  const visible = papers.filter((paper) => !paper.removed_by_user);
  const section = el("section", { class: "papers-section" },
    el("h3", {}, `Papers (${visible.length})`));
  for (const paper of visible) {
    const relationInput = el("input", {
      class: "relation-input",
      type: "text",
      value: paper.project_relation ?? "",
    }) as HTMLInputElement;
    section.append(
      el("div", { class: "paper-row", "data-paper-id": paper.paper_id },
        el("strong", {}, paper.title),
        paper.url ? el("a", { href: paper.url, target: "_blank" }, "link") : null,
        relationInput,
        el("button", {
          class: "save-relation",
          onclick: () => handlers.onEditRelation(paper.paper_id, relationInput.value),
        }, "Save"),
        el("button", {
          class: "remove-paper",
          onclick: () => handlers.onRemovePaper(paper.paper_id),
        }, "Remove"),
      ),
    );
  }
  return section;
}

export function renderProjectDetails(
  container: HTMLElement,
  project: ProjectDetails,
  papers: PaperInfo[],
  questions: QuestionInfo[],
  handlers: ProjectDetailsHandlers,
): void {
  clear(container);
  container.append(el("h2", {}, project.name));

  container.append(stateSection(project, handlers));

  const frequencySelect = el("select", { class: "frequency-select" }) as HTMLSelectElement;
  for (const frequency of FREQUENCIES) {
    const option = el("option", { value: frequency }, frequency) as HTMLOptionElement;
    if (frequency === project.frequency) option.selected = true;
    frequencySelect.append(option);
  }
  frequencySelect.addEventListener("change", () => {
    void handlers.onSetFrequency(frequencySelect.value);
  });

  const refreshButton = el(
    "button",
    {
      class: "manual-refresh",
      disabled: project.run_in_flight,
      onclick: async () => {
        refreshButton.disabled = true;
        try {
          await handlers.onManualRefresh();
        } finally {
          refreshButton.disabled = false;
        }
      },
    },
    project.run_in_flight ? "Update running…" : "Get new suggestions now",
  );

  container.append(
    el("section", { class: "settings-section" },
      el("h3", {}, "Updates"),
      el("label", {}, "Check frequency: ", frequencySelect),
      refreshButton,
    ),
  );

  container.append(papersSection(papers, handlers));

  const questionsSection = el("section", { class: "questions-section" },
    el("h3", {}, `Questions (${questions.length})`));
  const list = el("ul", {});
  for (const question of questions) {
    list.append(
      el("li", {},
        el("button", {
          class: "link-button",
          onclick: () => handlers.onOpenQuestion(question.question_id),
        }, question.text),
        question.tracked ? el("span", { class: "badge tracked" }, " tracked") : null,
      ),
    );
  }
  questionsSection.append(list);
  container.append(questionsSection);
}
