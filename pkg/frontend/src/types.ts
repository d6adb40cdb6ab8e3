// Read-only projections of the HTTP API payloads. The UI holds no
// authoritative state: every mutation is one API call and the view
// re-renders from the response.

export interface SourceInfo {
  source_id: string;
  kind: string;
  address: string;
  display_name: string;
}

export interface StateInfo {
  label: string;
  rationale: string;
  assessed_at: string;
  user_overridden: boolean;
}

export interface ProjectDetails {
  project_id: string;
  name: string;
  frequency: string;
  created_at: string;
  sources: SourceInfo[];
  state: StateInfo | null;
  question_count: number;
  paper_count: number;
  latest_run_id: string | null;
  latest_revision_id: number | null;
  run_in_flight: boolean;
}

export interface PaperLabelRef {
  label: string;
  to_lookup: boolean;
}

export interface AnchorInfo {
  suggestion_id: string;
  sentence_index: number;
  quote: string;
  reasoning: string;
  location: string;
  revision_id: number | null;
}

export interface SuggestionCard {
  suggestion_id: string;
  question_id: string;
  title: string;
  text: string;
  papers: PaperLabelRef[];
  info: string;
  rank: number | null;
  delivered_at: string | null;
  anchor: AnchorInfo | null;
  run_id: string | null;
  revision_id: number | null;
  source: string;
  question_text: string | null;
}

export interface SentenceInfo {
  index: number;
  start: number;
  end: number;
  content: string;
}

export interface DocumentPayload {
  project_id: string;
  revision_id: number;
  fetched_at: string;
  text: string;
  sentences: SentenceInfo[];
  anchors: AnchorInfo[];
}

export interface QuestionInfo {
  question_id: string;
  text: string;
  explanation: string;
  origin: string;
  rank: number | null;
  tracked: boolean;
  status: string;
  created_at: string;
  source_revision_id: number | null;
}

export interface AnswerInfo {
  question_id: string;
  answer_text: string;
  citation_labels: Record<string, { title: string | null; paper_id: string | null; url: string | null }>;
  retrieved_at: string;
  provider_id: string;
  answer_ref: string;
}

export interface QuestionPagePayload {
  project_id: string;
  question: QuestionInfo;
  summary: string | null;
  answers: AnswerInfo[];
  suggestions: SuggestionCard[];
}

export interface PaperInfo {
  paper_id: string;
  title: string;
  url: string | null;
  mention_contexts: string[];
  project_relation: string | null;
  relation_user_edited: boolean;
  removed_by_user: boolean;
}

export interface RefreshResponse {
  run_id: string | null;
  status: string;
}

export interface ApiErrorBody {
  machine_code: string;
  message: string;
}
