// Wire shapes returned by the tutoring service. The client never fabricates
// any of this state; everything round-trips through the API.

export type Profile = "S1" | "S2" | "S3";
export type Band = "A" | "B" | "C";
export type GuidanceMode = "clarify" | "follow_up" | "refresher";
export type SurveyPhase = "pre" | "post";

export interface ExchangeView {
  index: number;
  mode: GuidanceMode;
  student_input: string | null;
  response_text: string;
  rating: number | null;
  timestamp: string;
}

export interface SessionView {
  session_id: string;
  profile: Profile;
  question_id: string;
  question_text: string;
  band: Band;
  state: "active" | "completed";
  created_at: string;
  exchanges: ExchangeView[];
  surveys_submitted: SurveyPhase[];
}

export interface QuestionView {
  question_id: string;
  text: string;
  band: Band;
  concept_id: string;
  concept_title: string;
}

export interface ApiErrorBody {
  error: string;
  message: string;
}
