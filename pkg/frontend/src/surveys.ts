// Survey item definitions. Keys must match the service's questionnaire
// schema; each item is answered on a labeled 1-5 scale.

export interface SurveyItem {
  key: string;
  prompt: string;
  anchors: [string, string, string, string, string];
}

const FAMILIARITY: SurveyItem["anchors"] = [
  "Not at all familiar",
  "Slightly familiar",
  "Moderately familiar",
  "Familiar",
  "Very familiar",
];

const USEFULNESS: SurveyItem["anchors"] = [
  "Not useful",
  "Slightly useful",
  "Moderately useful",
  "Useful",
  "Very useful",
];

export const PRE_SURVEY: SurveyItem[] = [
  { key: "ai_familiarity", prompt: "How familiar are you with AI tools in education?", anchors: FAMILIARITY },
  { key: "llm_familiarity", prompt: "How familiar are you with large language models?", anchors: FAMILIARITY },
  {
    key: "llm_use_frequency",
    prompt: "How often do you use LLM tools?",
    anchors: ["Never", "Rarely", "Sometimes", "Often", "Very often"],
  },
  {
    key: "llm_usefulness_feedback",
    prompt: "How useful are LLMs for giving you feedback on your work?",
    anchors: USEFULNESS,
  },
  {
    key: "llm_usefulness_questions",
    prompt: "How useful are LLMs for asking questions?",
    anchors: USEFULNESS,
  },
  {
    key: "llm_usefulness_current_learning",
    prompt: "How useful are LLMs for your current learning activities?",
    anchors: USEFULNESS,
  },
];

export const POST_SURVEY: SurveyItem[] = [
  {
    key: "ease_of_use",
    prompt: "How easy was the tutor to use?",
    anchors: ["Very difficult", "Difficult", "Neutral", "Easy", "Very easy"],
  },
  {
    key: "correctness",
    prompt: "How correct were the responses you received?",
    anchors: ["Very Incorrect", "Incorrect", "Neither Correct nor Incorrect", "Correct", "Very Correct"],
  },
  {
    key: "usefulness",
    prompt: "How useful was the tutor while solving the problem?",
    anchors: USEFULNESS,
  },
  {
    key: "hallucination_frequency",
    prompt: "How often did responses contain information irrelevant to you or the question?",
    anchors: ["Constantly", "Often", "Sometimes", "Rarely", "Never"],
  },
];

export const RATING_ANCHORS: SurveyItem["anchors"] = [
  "Very poor",
  "Poor",
  "Acceptable",
  "Good",
  "Very good",
];

export function isComplete(items: SurveyItem[], answers: Record<string, number>): boolean {
  return items.every((item) => {
    const value = answers[item.key];
    return Number.isInteger(value) && value >= 1 && value <= 5;
  });
}
