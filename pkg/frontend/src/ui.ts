import { PilotFlow } from "./flow.js";
import { POST_SURVEY, PRE_SURVEY, RATING_ANCHORS, SurveyItem } from "./surveys.js";
import type { GuidanceMode } from "./types.js";

/** Renders the whole app from the flow state; every event re-renders. */
export class App {
  private followUpDraft = "";

  constructor(
    private readonly root: HTMLElement,
    private readonly flow: PilotFlow,
  ) {}

  render(): void {
    const state = this.flow.view();
    this.root.replaceChildren();
    if (state.error) {
      this.root.append(banner(state.error));
    }
    switch (state.phase) {
      case "pre_survey":
        this.renderPreSurvey();
        break;
      case "tutoring":
        this.renderTutoring();
        break;
      case "post_survey":
        this.renderPostSurvey();
        break;
      case "done":
        this.renderDone();
        break;
    }
  }

  private renderPreSurvey(): void {
    this.root.append(heading("Before you start"));
    this.root.append(
      paragraph("Tell us how you currently relate to AI study tools. All items are required."),
    );
    for (const item of PRE_SURVEY) {
      this.root.append(this.likertRow(item, this.flow.view().preAnswers[item.key], (v) => {
        this.flow.answerPre(item.key, v);
        this.render();
      }));
    }
    const start = button("Start the session", async () => {
      await this.flow.start();
      this.render();
    });
    start.disabled = !this.flow.canStart();
    this.root.append(start);
  }

  private renderTutoring(): void {
    const state = this.flow.view();
    const session = state.session!;
    this.root.append(heading(`Your question (profile ${session.profile})`));
    this.root.append(paragraph(state.question?.text ?? session.question_text));

    for (const exchange of session.exchanges) {
      const card = div("exchange");
      card.append(paragraph(`[${exchange.mode}] ${exchange.response_text}`));
      if (exchange.rating === null) {
        const row = div("rating");
        RATING_ANCHORS.forEach((label, i) => {
          const b = button(`${i + 1} ${label}`, async () => {
            await this.flow.rate(exchange.index, i + 1);
            this.render();
          });
          b.disabled = !this.flow.ratingAllowed(exchange.index);
          row.append(b);
        });
        card.append(row);
      } else {
        card.append(paragraph(`your rating: ${exchange.rating}/5`));
      }
      this.root.append(card);
    }

    const actions = div("actions");
    const ask = (mode: GuidanceMode, input?: string) => async () => {
      await this.flow.requestGuidance(mode, input);
      this.followUpDraft = "";
      this.render();
    };
    const clarify = button("Ask for clarification", ask("clarify"));
    clarify.disabled = !this.flow.guidanceAllowed("clarify");
    const refresher = button("Refresh related concepts", ask("refresher"));
    refresher.disabled = !this.flow.guidanceAllowed("refresher");

    const input = document.createElement("input");
    input.type = "text";
    input.placeholder = "Type a specific follow-up question";
    input.value = this.followUpDraft;
    input.addEventListener("input", () => {
      this.followUpDraft = input.value;
      followUp.disabled = !this.flow.guidanceAllowed("follow_up", this.followUpDraft);
    });
    const followUp = button("Ask follow-up", ask("follow_up", this.followUpDraft));
    followUp.addEventListener("click", () => (followUp.disabled = true));
    followUp.disabled = !this.flow.guidanceAllowed("follow_up", this.followUpDraft);

    actions.append(clarify, input, followUp, refresher);
    this.root.append(actions);

    const finish = button("I am done, open the final survey", () => {
      this.flow.openPostSurvey();
      this.render();
    });
    finish.disabled = !this.flow.canFinishTutoring();
    this.root.append(finish);
  }

  private renderPostSurvey(): void {
    this.root.append(heading("Final survey"));
    for (const item of POST_SURVEY) {
      this.root.append(this.likertRow(item, this.flow.view().postAnswers[item.key], (v) => {
        this.flow.answerPost(item.key, v);
        this.render();
      }));
    }
    const free = document.createElement("textarea");
    free.placeholder = "Anything else you want to tell us (optional)";
    free.value = this.flow.view().postFreeText;
    free.addEventListener("input", () => this.flow.setPostFreeText(free.value));
    this.root.append(free);

    const submit = button("Submit and finish", async () => {
      await this.flow.finish();
      this.render();
    });
    submit.disabled = !this.flow.canSubmitPost();
    this.root.append(submit);
  }

  private renderDone(): void {
    const session = this.flow.view().session!;
    this.root.append(heading("Thank you!"));
    this.root.append(
      paragraph(`Your participation is recorded. Session reference: ${session.session_id}`),
    );
  }

  private likertRow(item: SurveyItem, current: number | undefined, onPick: (v: number) => void) {
    const row = div("likert");
    row.append(paragraph(item.prompt));
    item.anchors.forEach((label, i) => {
      const b = button(`${i + 1} ${label}`, () => onPick(i + 1));
      if (current === i + 1) {
        b.classList.add("selected");
      }
      row.append(b);
    });
    return row;
  }
}

function heading(text: string): HTMLElement {
  const el = document.createElement("h2");
  el.textContent = text;
  return el;
}

function paragraph(text: string): HTMLElement {
  const el = document.createElement("p");
  el.textContent = text;
  return el;
}

function banner(text: string): HTMLElement {
  const el = document.createElement("div");
  el.className = "error";
  el.setAttribute("role", "alert");
  el.textContent = text;
  return el;
}

function div(className: string): HTMLDivElement {
  const el = document.createElement("div");
  el.className = className;
  return el;
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const el = document.createElement("button");
  el.textContent = label;
  el.addEventListener("click", onClick);
  return el;
}
