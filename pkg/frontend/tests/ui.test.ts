// UI tests against the live backend serving the fixture project:
// dashboard order, anchored highlighting, track toggle, state override.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { renderDashboard } from "../src/dashboard.js";
import { renderDocumentView, usableAnchor } from "../src/documentView.js";
import { renderProjectDetails } from "../src/projectDetails.js";
import { renderQuestionPage } from "../src/questionPage.js";
import type { DocumentPayload, SuggestionCard } from "../src/types.js";

const PROJECT_ID = "fixture";

let server: ChildProcess;
let workspace: string;
let baseUrl: string;
let api: ApiClient;

function startServer(): Promise<string> {
  workspace = mkdtempSync(join(tmpdir(), "litscout-ui-"));
  server = spawn("python3", [join(process.cwd(), "tests", "server_bootstrap.py"), workspace], {
    stdio: ["ignore", "pipe", "inherit"],
  });
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("backend start timeout")), 90_000);
    let buffer = "";
    server.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/READY (\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(`http://127.0.0.1:${match[1]}`);
      }
    });
    server.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`backend exited early with code ${code}`));
    });
  });
}

async function waitForApi(url: string): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${url}/api/v1/projects`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("backend never became reachable");
}

beforeAll(async () => {
  baseUrl = await startServer();
  await waitForApi(baseUrl);
  api = new ApiClient(baseUrl);
});

afterAll(() => {
  server?.kill();
  if (workspace) rmSync(workspace, { recursive: true, force: true });
});

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  container = document.getElementById("app")!;
});

describe("dashboard", () => {
  it("renders the 12-card fixture in rank order", async () => {
    const cards = await api.getSuggestions(PROJECT_ID);
    expect(cards).toHaveLength(12);
    renderDashboard(container, "PeerCraft", cards, {
      onViewContext: () => {},
      onOpenQuestion: () => {},
    });
    const rendered = [...container.querySelectorAll(".suggestion-card")];
    expect(rendered).toHaveLength(12);
    const ranks = rendered.map((node) => Number(node.getAttribute("data-rank")));
    expect(ranks).toEqual([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]);
    // Order on screen matches the API's rank order exactly.
    const ids = rendered.map((node) => node.getAttribute("data-suggestion-id"));
    const expected = [...cards]
      .sort((a, b) => (a.rank ?? 0) - (b.rank ?? 0))
      .map((card) => card.suggestion_id);
    expect(ids).toEqual(expected);
  });

  it("shows an empty state when there are no suggestions", () => {
    renderDashboard(container, "Empty", [], {
      onViewContext: () => {},
      onOpenQuestion: () => {},
    });
    expect(container.querySelector(".empty-state")).not.toBeNull();
    expect(container.querySelectorAll(".suggestion-card")).toHaveLength(0);
  });

  it("card context click routes to the document view with the card selected", async () => {
    const cards = await api.getSuggestions(PROJECT_ID);
    let navigatedTo: string | null = null;
    const app = new App(api, container, (hash) => {
      navigatedTo = hash;
    });
    await app.route(`#/projects/${PROJECT_ID}`);
    const firstCard = container.querySelector(".suggestion-card")!;
    const button = firstCard.querySelector<HTMLButtonElement>(".view-context")!;
    button.click();
    expect(navigatedTo).toBe(
      `#/projects/${PROJECT_ID}/document?s=${cards.find((c) => c.rank === 1)!.suggestion_id}`,
    );
  });
});

describe("document view", () => {
  it("highlights exactly the sentence whose text equals the anchor quote", async () => {
    const [doc, cards] = await Promise.all([
      api.getDocument(PROJECT_ID),
      api.getSuggestions(PROJECT_ID),
    ]);
    const selected = cards.find((card) => card.rank === 1)!;
    expect(selected.anchor).not.toBeNull();
    renderDocumentView(container, doc, cards, selected.suggestion_id);
    const highlighted = container.querySelector<HTMLElement>(".sentence.selected")!;
    expect(highlighted).not.toBeNull();
    expect(highlighted.textContent).toBe(selected.anchor!.quote);
    const index = Number(highlighted.getAttribute("data-sentence-index"));
    expect(highlighted.textContent).toBe(doc.sentences[index].content);
  });

  it("never highlights a sentence whose text differs from the quote", async () => {
    const [doc, cards] = await Promise.all([
      api.getDocument(PROJECT_ID),
      api.getSuggestions(PROJECT_ID),
    ]);
    renderDocumentView(container, doc, cards, null);
    const sentenceByIndex = new Map(doc.sentences.map((s) => [s.index, s.content]));
    for (const node of container.querySelectorAll<HTMLElement>(".sentence.highlight")) {
      const index = Number(node.getAttribute("data-sentence-index"));
      expect(node.textContent).toBe(sentenceByIndex.get(index));
    }
  });

  it("shows a note for unanchored suggestions instead of a highlight", async () => {
    const doc = await api.getDocument(PROJECT_ID);
    const unanchored: SuggestionCard = {
      suggestion_id: "s-unanchored",
      question_id: "q-x",
      title: "No context here",
      text: "body",
      papers: [],
      info: "",
      rank: 1,
      delivered_at: null,
      anchor: null,
      run_id: null,
      revision_id: doc.revision_id,
      source: "report",
      question_text: null,
    };
    renderDocumentView(container, doc, [unanchored], "s-unanchored");
    expect(container.querySelector(".note.no-context")?.textContent).toContain(
      "No context here",
    );
    expect(container.querySelectorAll(".sentence.selected")).toHaveLength(0);
  });

  it("suppresses highlights from anchors minted against another revision", async () => {
    const doc = await api.getDocument(PROJECT_ID);
    const cards = await api.getSuggestions(PROJECT_ID);
    const card = cards.find((c) => c.anchor !== null)!;
    const staleDoc: DocumentPayload = { ...doc, revision_id: doc.revision_id + 1 };
    expect(usableAnchor(card.anchor, doc)).not.toBeNull();
    expect(usableAnchor(card.anchor, staleDoc)).toBeNull();
    renderDocumentView(container, staleDoc, [card], card.suggestion_id);
    expect(container.querySelectorAll(".sentence.highlight")).toHaveLength(0);
    expect(container.querySelector(".note.no-context")).not.toBeNull();
  });
});

describe("question page", () => {
  it("track toggle round-trips through the API and re-renders", async () => {
    const cards = await api.getSuggestions(PROJECT_ID);
    const questionId = cards[0].question_id;
    const app = new App(api, container, () => {});
    await app.route(`#/questions/${questionId}`);
    let toggle = container.querySelector<HTMLButtonElement>(".track-toggle")!;
    expect(toggle.getAttribute("data-tracked")).toBe("false");

    toggle.click();
    await new Promise((resolve) => setTimeout(resolve, 300));
    toggle = container.querySelector<HTMLButtonElement>(".track-toggle")!;
    expect(toggle.getAttribute("data-tracked")).toBe("true");
    // The API agrees: the mutation went through, not just local state.
    const refreshed = await api.getQuestion(questionId);
    expect(refreshed.question.tracked).toBe(true);

    toggle.click();
    await new Promise((resolve) => setTimeout(resolve, 300));
    toggle = container.querySelector<HTMLButtonElement>(".track-toggle")!;
    expect(toggle.getAttribute("data-tracked")).toBe("false");
    expect((await api.getQuestion(questionId)).question.tracked).toBe(false);
  });

  it("shows rationale, summary, and full answers", async () => {
    const cards = await api.getSuggestions(PROJECT_ID);
    const payload = await api.getQuestion(cards[0].question_id);
    renderQuestionPage(container, payload, {
      onToggleTrack: async () => {},
      onOpenSuggestionContext: () => {},
    });
    expect(container.querySelector(".rationale")?.textContent).toContain(
      payload.question.explanation.slice(0, 30),
    );
    expect(container.querySelector(".summary")).not.toBeNull();
    expect(container.querySelectorAll(".answer")).toHaveLength(payload.answers.length);
    expect(container.querySelectorAll(".linked-suggestion").length).toBeGreaterThan(0);
  });
});

describe("project details", () => {
  it("state override round-trips through the API and re-renders", async () => {
    const app = new App(api, container, () => {});
    await app.route(`#/projects/${PROJECT_ID}/details`);
    const input = container.querySelector<HTMLInputElement>(".state-input")!;
    input.value = "Ideation";
    container.querySelector<HTMLButtonElement>(".apply-override")!.click();
    await new Promise((resolve) => setTimeout(resolve, 300));

    const badge = container.querySelector<HTMLElement>(".state-badge")!;
    expect(badge.textContent).toContain("Ideation");
    expect(badge.getAttribute("data-overridden")).toBe("true");
    expect((await api.getProject(PROJECT_ID)).state!.user_overridden).toBe(true);

    container.querySelector<HTMLButtonElement>(".clear-override")!.click();
    await new Promise((resolve) => setTimeout(resolve, 300));
    expect(
      container.querySelector<HTMLElement>(".state-badge")!.getAttribute("data-overridden"),
    ).toBe("false");
    expect((await api.getProject(PROJECT_ID)).state!.user_overridden).toBe(false);
  });

  it("removing a paper flags it removed and hides the card", async () => {
    const papersBefore = await api.getPapers(PROJECT_ID);
    const victim = papersBefore.find((paper) => !paper.removed_by_user)!;
    const app = new App(api, container, () => {});
    await app.route(`#/projects/${PROJECT_ID}/details`);
    const row = container.querySelector<HTMLElement>(
      `.paper-row[data-paper-id="${victim.paper_id}"]`,
    )!;
    row.querySelector<HTMLButtonElement>(".remove-paper")!.click();
    await new Promise((resolve) => setTimeout(resolve, 300));

    expect(
      container.querySelector(`.paper-row[data-paper-id="${victim.paper_id}"]`),
    ).toBeNull();
    const papersAfter = await api.getPapers(PROJECT_ID);
    expect(papersAfter.find((p) => p.paper_id === victim.paper_id)!.removed_by_user).toBe(true);
  });

  it("manual refresh while busy disables the button and shows a busy toast", async () => {
    const project = await api.getProject(PROJECT_ID);
    const questions = await api.getQuestions(PROJECT_ID);
    const papers = await api.getPapers(PROJECT_ID);
    renderProjectDetails(container, { ...project, run_in_flight: true }, papers, questions, {
      onOverrideState: async () => {},
      onClearOverride: async () => {},
      onEditRelation: async () => {},
      onRemovePaper: async () => {},
      onSetFrequency: async () => {},
      onManualRefresh: async () => {},
      onOpenQuestion: () => {},
    });
    const button = container.querySelector<HTMLButtonElement>(".manual-refresh")!;
    expect(button.disabled).toBe(true);
    expect(button.textContent).toContain("running");
  });

  it("frequency change round-trips through the API", async () => {
    const app = new App(api, container, () => {});
    await app.route(`#/projects/${PROJECT_ID}/details`);
    const select = container.querySelector<HTMLSelectElement>(".frequency-select")!;
    select.value = "daily";
    select.dispatchEvent(new Event("change"));
    await new Promise((resolve) => setTimeout(resolve, 300));
    expect((await api.getProject(PROJECT_ID)).frequency).toBe("daily");
    // restore
    await api.setFrequency(PROJECT_ID, "weekly");
  });
});
