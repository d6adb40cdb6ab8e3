import { clear, el } from "./dom.js";
import type { QuestionPagePayload, SuggestionCard } from "./types.js";

export interface QuestionPageHandlers {
  onToggleTrack(questionId: string, tracked: boolean): Promise<void>;
  onOpenSuggestionContext(card: SuggestionCard): void;
}

export function renderQuestionPage(
  container: HTMLElement,
  payload: QuestionPagePayload,
  handlers: QuestionPageHandlers,
): void {
  clear(container);
  const question = payload.question;

  const trackButton = el(
    "button",
    {
      class: "track-toggle",
      "data-tracked": String(question.tracked),
      onclick: async () => {
        trackButton.disabled = true; // optimistic disable-while-pending
        try {
          await handlers.onToggleTrack(question.question_id, !question.tracked);
        } finally {
          trackButton.disabled = false;
        }
      },
    },
    question.tracked ? "Tracking ✓" : "Track",
  );

  container.append(
    el("h2", {}, question.text),
    el("div", { class: "question-meta" },
      el("span", { class: `status status-${question.status}` }, question.status),
      el("span", { class: "origin" }, question.origin),
      trackButton,
    ),
  );
  if (question.explanation) {
    container.append(
      el("section", { class: "rationale" },
        el("h3", {}, "Why this question"),
        el("p", {}, question.explanation)),
    );
  }
  if (payload.summary) {
    container.append(
      el("section", { class: "summary" },
        el("h3", {}, "Summary"),
        el("p", {}, payload.summary)),
    );
  }

  const answers = el("section", { class: "answers" }, el("h3", {}, "Full answers"));
  if (payload.answers.length === 0) {
    answers.append(el("p", { class: "empty-state" }, "Not answered yet."));
  }
  for (const answer of payload.answers) {
    answers.append(
      el("details", { class: "answer" },
        el("summary", {}, `Answer ${answer.answer_ref} (${answer.retrieved_at})`),
        el("pre", { class: "answer-text" }, answer.answer_text),
      ),
    );
  }
  container.append(answers);

  const linked = el("section", { class: "linked-suggestions" },
    el("h3", {}, "Suggestions from this question"));
  if (payload.suggestions.length === 0) {
    linked.append(el("p", { class: "empty-state" }, "No suggestions delivered yet."));
  }
  for (const card of payload.suggestions) {
    linked.append(
      el("div", { class: "linked-suggestion", "data-suggestion-id": card.suggestion_id },
        el("strong", {}, card.title),
        el("span", { class: `source source-${card.source}` },
          card.source === "answer_diff" ? " (answer update)" : ""),
        el("p", {}, card.text),
        el("button", {
          class: "link-button view-context",
          onclick: () => handlers.onOpenSuggestionContext(card),
        }, "view relevant context"),
      ),
    );
  }
  container.append(linked);
}

export interface QuestionListHandlers {
  onAddQuestion(text: string): Promise<void>;
  onOpenQuestion(questionId: string): void;
}

export function renderQuestionList(
  container: HTMLElement,
  questions: QuestionPagePayload["question"][],
  handlers: QuestionListHandlers,
): void {
  clear(container);
  container.append(el("h2", {}, "Questions"));
  const input = el("input", {
    class: "question-input",
    type: "text",
    placeholder: "Add your own question…",
  });
  const addButton = el(
    "button",
    {
      class: "add-question",
      onclick: async () => {
        const text = input.value.trim();
        if (!text) return;
        addButton.disabled = true;
        try {
          await handlers.onAddQuestion(text);
          input.value = "";
        } finally {
          addButton.disabled = false;
        }
      },
    },
    "Add question",
  );
  container.append(el("div", { class: "add-question-form" }, input, addButton));

  const list = el("ul", { class: "question-list" });
  for (const question of questions) {
    list.append(
      el("li", { "data-question-id": question.question_id },
        el("button", {
          class: "link-button question-link",
          onclick: () => handlers.onOpenQuestion(question.question_id),
        }, question.text),
        el("span", { class: "badges" },
          question.tracked ? el("span", { class: "badge tracked" }, "tracked") : null,
          el("span", { class: `badge ${question.origin}` }, question.origin),
          el("span", { class: `badge ${question.status}` }, question.status),
        ),
      ),
    );
  }
  container.append(list);
}
