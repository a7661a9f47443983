import type {
  ApiErrorBody,
  GuidanceMode,
  Profile,
  QuestionView,
  SessionView,
  SurveyPhase,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

/** Thin typed client over the tutoring service; base URL is the only config. */
export class TutorApi {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    if (!resp.ok) {
      let code = "http_error";
      let message = text || `HTTP ${resp.status}`;
      try {
        const parsed = JSON.parse(text) as ApiErrorBody;
        code = parsed.error ?? code;
        message = parsed.message ?? message;
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(resp.status, code, message);
    }
    return (text ? JSON.parse(text) : undefined) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/healthz");
  }

  createSession(profile?: Profile): Promise<SessionView> {
    return this.request("POST", "/sessions", profile ? { profile } : {});
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  getQuestion(sessionId: string): Promise<QuestionView> {
    return this.request("GET", `/sessions/${sessionId}/question`);
  }

  requestGuidance(sessionId: string, mode: GuidanceMode, input?: string) {
    return this.request<import("./types.js").ExchangeView>(
      "POST",
      `/sessions/${sessionId}/guidance`,
      input === undefined ? { mode } : { mode, input },
    );
  }

  rateExchange(sessionId: string, index: number, score: number) {
    return this.request<import("./types.js").ExchangeView>(
      "POST",
      `/sessions/${sessionId}/exchanges/${index}/rating`,
      { score },
    );
  }

  submitSurvey(sessionId: string, phase: SurveyPhase, items: Record<string, number>, freeText?: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${sessionId}/surveys/${phase}`, {
      items,
      free_text: freeText ?? null,
    });
  }

  exportLogs(): Promise<string> {
    return fetch(`${this.baseUrl}/export`).then((r) => r.text());
  }
}
