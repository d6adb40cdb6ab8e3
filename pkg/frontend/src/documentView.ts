import { clear, el } from "./dom.js";
import type { AnchorInfo, DocumentPayload, SuggestionCard } from "./types.js";

// A highlight renders only when the anchor belongs to the displayed
// revision AND its quote equals the on-screen sentence text. The second
// check re-verifies the quote in the client so a stale or corrupt anchor
// can never highlight the wrong words.
export function usableAnchor(
  anchor: AnchorInfo | null,
  doc: DocumentPayload,
): AnchorInfo | null {
  if (!anchor) return null;
  if (anchor.revision_id !== doc.revision_id) return null;
  const sentence = doc.sentences[anchor.sentence_index];
  if (!sentence || sentence.content !== anchor.quote) return null;
  return anchor;
}

export function renderDocumentView(
  container: HTMLElement,
  doc: DocumentPayload,
  suggestions: SuggestionCard[],
  selectedSuggestionId: string | null,
): void {
  clear(container);
  container.append(el("h2", {}, `Document (revision ${doc.revision_id})`));

  const selected = suggestions.find((s) => s.suggestion_id === selectedSuggestionId) ?? null;
  const selectedAnchor = selected ? usableAnchor(selected.anchor, doc) : null;
  if (selected && !selectedAnchor) {
    container.append(
      el("p", { class: "note no-context" }, `"${selected.title}" has no document context.`),
    );
  }

  const anchoredIndexes = new Map<number, AnchorInfo[]>();
  for (const card of suggestions) {
    const anchor = usableAnchor(card.anchor, doc);
    if (!anchor) continue;
    const bucket = anchoredIndexes.get(anchor.sentence_index) ?? [];
    bucket.push(anchor);
    anchoredIndexes.set(anchor.sentence_index, bucket);
  }

  const body = el("div", { class: "document-body" });
  for (const sentence of doc.sentences) {
    const anchors = anchoredIndexes.get(sentence.index) ?? [];
    const classes = ["sentence"];
    if (anchors.length > 0) classes.push("highlight");
    const isSelected =
      selectedAnchor !== null && selectedAnchor.sentence_index === sentence.index;
    if (isSelected) classes.push("selected");
    const node = el(
      "span",
      {
        class: classes.join(" "),
        "data-sentence-index": String(sentence.index),
        title: anchors.map((a) => a.reasoning).join("\n"),
      },
      sentence.content,
    );
    body.append(node, " ");
    if (isSelected) {
      // jsdom has no scrollIntoView; guard for the test environment.
      if (typeof node.scrollIntoView === "function") {
        node.scrollIntoView({ block: "center" });
      }
    }
  }
  container.append(body);

  if (selected && selectedAnchor) {
    container.append(
      el(
        "aside",
        { class: "anchor-detail" },
        el("h3", {}, selected.title),
        el("p", {}, selected.text),
        el("p", { class: "reasoning" }, selectedAnchor.reasoning),
        el("p", { class: "location" }, selectedAnchor.location),
      ),
    );
  }
}
