import { describe, expect, test } from "vitest";

import { TutorApi } from "../src/api.js";
import { PilotFlow } from "../src/flow.js";
import { PRE_SURVEY, isComplete } from "../src/surveys.js";
import { PRE_ANSWERS } from "./helpers";

describe("client-side gates (no server)", () => {
  test("pre-survey gate blocks starting until every item is answered", async () => {
    const flow = new PilotFlow(new TutorApi("http://127.0.0.1:1")); // never reached
    expect(flow.canStart()).toBe(false);

    const state = await flow.start();
    expect(state.phase).toBe("pre_survey");
    expect(state.session).toBeNull();
    expect(state.error).toMatch(/pre-survey/);

    for (const item of PRE_SURVEY.slice(0, -1)) {
      flow.answerPre(item.key, 3);
    }
    expect(flow.canStart()).toBe(false); // one item still missing

    flow.answerPre(PRE_SURVEY[PRE_SURVEY.length - 1].key, 5);
    expect(flow.canStart()).toBe(true);
  });

  test("service down leaves an error and no phantom session", async () => {
    const flow = new PilotFlow(new TutorApi("http://127.0.0.1:1"));
    for (const [key, value] of Object.entries(PRE_ANSWERS)) {
      flow.answerPre(key, value);
    }
    const state = await flow.start();
    expect(state.phase).toBe("pre_survey");
    expect(state.session).toBeNull();
    expect(state.error).toBeTruthy();
  });

  test("follow-up requires a non-empty question client-side", () => {
    const flow = new PilotFlow(new TutorApi("http://127.0.0.1:1"));
    expect(flow.guidanceAllowed("follow_up", "")).toBe(false);
    expect(flow.guidanceAllowed("follow_up", "   ")).toBe(false);
    // Even with text, guidance stays blocked outside the tutoring phase.
    expect(flow.guidanceAllowed("follow_up", "why?")).toBe(false);
    expect(flow.guidanceAllowed("clarify")).toBe(false);
  });

  test("survey completeness helper", () => {
    expect(isComplete(PRE_SURVEY, PRE_ANSWERS)).toBe(true);
    expect(isComplete(PRE_SURVEY, { ...PRE_ANSWERS, ai_familiarity: 0 })).toBe(false);
    expect(isComplete(PRE_SURVEY, {})).toBe(false);
  });
});
