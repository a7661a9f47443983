import { ApiError, TutorApi } from "./api.js";
import { POST_SURVEY, PRE_SURVEY, isComplete } from "./surveys.js";
import type { GuidanceMode, Profile, QuestionView, SessionView } from "./types.js";

export type Phase = "pre_survey" | "tutoring" | "post_survey" | "done";

export interface FlowState {
  phase: Phase;
  preAnswers: Record<string, number>;
  postAnswers: Record<string, number>;
  postFreeText: string;
  session: SessionView | null;
  question: QuestionView | null;
  pending: boolean;
  error: string | null;
}

/** The pilot flow in fixed order: pre-survey, tutoring, post-survey.
 *
 * All authoritative state lives on the server; this class only holds survey
 * drafts and mirrors of the latest API responses. Every mutation refetches or
 * applies the server's reply, so reloading a page and resuming a session
 * reconstructs the same view.
 */
export class PilotFlow {
  private state: FlowState = {
    phase: "pre_survey",
    preAnswers: {},
    postAnswers: {},
    postFreeText: "",
    session: null,
    question: null,
    pending: false,
    error: null,
  };

  constructor(private readonly api: TutorApi) {}

  view(): Readonly<FlowState> {
    return this.state;
  }

  answerPre(key: string, value: number): void {
    this.state.preAnswers[key] = value;
  }

  answerPost(key: string, value: number): void {
    this.state.postAnswers[key] = value;
  }

  setPostFreeText(text: string): void {
    this.state.postFreeText = text;
  }

  /** The pre-survey gate: session creation stays blocked until every item is answered. */
  canStart(): boolean {
    return this.state.phase === "pre_survey" && isComplete(PRE_SURVEY, this.state.preAnswers);
  }

  async start(profile?: Profile): Promise<FlowState> {
    if (this.state.phase !== "pre_survey") {
      return this.fail("flow already started");
    }
    if (!this.canStart()) {
      return this.fail("answer every pre-survey item before starting");
    }
    this.state.error = null;
    try {
      const session = await this.api.createSession(profile);
      await this.api.submitSurvey(session.session_id, "pre", this.state.preAnswers);
      this.state.session = await this.api.getSession(session.session_id);
      this.state.question = await this.api.getQuestion(session.session_id);
      this.state.phase = "tutoring";
    } catch (err) {
      // No phantom session on the client: state advances only on success.
      return this.fail(describe(err));
    }
    return this.state;
  }

  /** Re-enter a session after a reload; the server decides the phase. */
  async resume(sessionId: string): Promise<FlowState> {
    try {
      this.state.session = await this.api.getSession(sessionId);
      this.state.question = await this.api.getQuestion(sessionId);
      this.state.phase = this.state.session.state === "completed" ? "done" : "tutoring";
      this.state.error = null;
    } catch (err) {
      return this.fail(describe(err));
    }
    return this.state;
  }

  guidanceAllowed(mode: GuidanceMode, input?: string): boolean {
    if (this.state.phase !== "tutoring" || this.state.pending) {
      return false;
    }
    if (mode === "follow_up") {
      return (input ?? "").trim().length > 0;
    }
    return true;
  }

  async requestGuidance(mode: GuidanceMode, input?: string): Promise<FlowState> {
    if (!this.guidanceAllowed(mode, input)) {
      return this.fail(
        mode === "follow_up" && !(input ?? "").trim()
          ? "type your follow-up question first"
          : "guidance not available right now",
      );
    }
    const session = this.state.session!;
    this.state.pending = true;
    this.state.error = null;
    try {
      await this.api.requestGuidance(session.session_id, mode, input?.trim());
      this.state.session = await this.api.getSession(session.session_id);
    } catch (err) {
      return this.fail(describe(err));
    } finally {
      this.state.pending = false;
    }
    return this.state;
  }

  /** A rating posts once; afterwards the widget for that exchange stays locked. */
  ratingAllowed(index: number): boolean {
    const exchange = this.state.session?.exchanges[index];
    return !!exchange && exchange.rating === null && !this.state.pending;
  }

  async rate(index: number, score: number): Promise<FlowState> {
    if (!this.ratingAllowed(index)) {
      return this.fail("this response was already rated");
    }
    const session = this.state.session!;
    try {
      await this.api.rateExchange(session.session_id, index, score);
      this.state.session = await this.api.getSession(session.session_id);
      this.state.error = null;
    } catch (err) {
      return this.fail(describe(err));
    }
    return this.state;
  }

  /** The post-survey opens only after at least one completed exchange. */
  canFinishTutoring(): boolean {
    return this.state.phase === "tutoring" && (this.state.session?.exchanges.length ?? 0) > 0;
  }

  openPostSurvey(): FlowState {
    if (!this.canFinishTutoring()) {
      return this.fail("complete at least one exchange first");
    }
    this.state.phase = "post_survey";
    this.state.error = null;
    return this.state;
  }

  canSubmitPost(): boolean {
    return this.state.phase === "post_survey" && isComplete(POST_SURVEY, this.state.postAnswers);
  }

  async finish(): Promise<FlowState> {
    if (this.state.phase === "done") {
      return this.fail("post-survey already submitted");
    }
    if (!this.canSubmitPost()) {
      return this.fail("answer every post-survey item before submitting");
    }
    const session = this.state.session!;
    try {
      this.state.session = await this.api.submitSurvey(
        session.session_id,
        "post",
        this.state.postAnswers,
        this.state.postFreeText || undefined,
      );
      this.state.phase = "done";
      this.state.error = null;
    } catch (err) {
      return this.fail(describe(err));
    }
    return this.state;
  }

  private fail(message: string): FlowState {
    this.state.error = message;
    return this.state;
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}
