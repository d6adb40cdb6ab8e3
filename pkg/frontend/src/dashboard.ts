import { clear, el } from "./dom.js";
import type { SuggestionCard } from "./types.js";

export interface DashboardHandlers {
  onViewContext(card: SuggestionCard): void;
  onOpenQuestion(card: SuggestionCard): void;
}

const PREVIEW_CHARS = 180;

function cardNode(card: SuggestionCard, handlers: DashboardHandlers): HTMLElement {
  const preview =
    card.text.length > PREVIEW_CHARS ? `${card.text.slice(0, PREVIEW_CHARS)}…` : card.text;
  const body = el("p", { class: "card-text", "data-expanded": "false" }, preview);
  const expand = el(
    "button",
    {
      class: "link-button expand",
      onclick: () => {
        const expanded = body.getAttribute("data-expanded") === "true";
        body.textContent = expanded ? preview : card.text;
        body.setAttribute("data-expanded", String(!expanded));
        expand.textContent = expanded ? "show more" : "show less";
      },
    },
    "show more",
  );
  const chips = el(
    "span",
    { class: "chips" },
    ...card.papers.map((paper) =>
      el("span", { class: "chip" }, paper.to_lookup ? `${paper.label} ↺` : paper.label),
    ),
  );
  return el(
    "article",
    {
      class: "card suggestion-card",
      "data-suggestion-id": card.suggestion_id,
      "data-rank": String(card.rank ?? ""),
    },
    el("header", {},
      el("span", { class: "rank" }, `#${card.rank ?? "–"}`),
      el("h3", {}, card.title),
    ),
    body,
    card.text.length > PREVIEW_CHARS ? expand : null,
    el("footer", {},
      chips,
      card.anchor
        ? el("span", { class: "anchor-location" }, card.anchor.location || "document")
        : el("span", { class: "anchor-location none" }, "no document context"),
      el(
        "button",
        { class: "link-button view-context", onclick: () => handlers.onViewContext(card) },
        "view relevant context",
      ),
      el(
        "button",
        { class: "link-button open-question", onclick: () => handlers.onOpenQuestion(card) },
        "from question",
      ),
    ),
  );
}

export function renderDashboard(
  container: HTMLElement,
  projectName: string,
  cards: SuggestionCard[],
  handlers: DashboardHandlers,
): void {
  clear(container);
  const ordered = [...cards].sort((a, b) => (a.rank ?? 1e9) - (b.rank ?? 1e9));
  container.append(el("h2", {}, `Suggestions for ${projectName}`));
  if (ordered.length === 0) {
    container.append(
      el("p", { class: "empty-state" }, "No suggestions yet — they will appear after the next update run."),
    );
    return;
  }
  const list = el("div", { class: "card-list" });
  for (const card of ordered) list.append(cardNode(card, handlers));
  container.append(list);
}
