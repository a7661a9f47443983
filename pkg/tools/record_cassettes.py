#!/usr/bin/env python3
"""Regenerate the replay cassettes shipped under data/cassettes/.

The response texts are fixed fixtures authored for the shipped question set;
prompts and cassette keys are computed with the package itself so the
recordings always line up with what the runner and the tutoring service send.

Usage: python tools/record_cassettes.py [--out data/cassettes]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from aisensei.experiment_runner import BANDS, PROFILES  # noqa: E402
from aisensei.kgraph import load_graph  # noqa: E402
from aisensei.llm_gateway import CompletionRequest, FeedbackArtifact, record_cassette  # noqa: E402
from aisensei.prompt_engine import PromptRequest, render_p1  # noqa: E402
from aisensei.student_model import load_impasse_file  # noqa: E402
from aisensei.tutor_service import render_refresher  # noqa: E402

RECORDED_AT = "2025-06-02T09:00:00+00:00"

# The follow-up question used by the end-to-end client tests; its cassette is
# recorded here so replay-mode services can answer it offline.
FOLLOWUP_INPUT = "Why does multiplying two negative numbers give a positive result?"

FEEDBACK = {
    ("A", "S1"): (
        "Let us start with what substitution means. A variable such as x is a placeholder for a "
        "number, so substituting x = 4 means replacing every x in the expression with 4. The "
        "expression 3x + 2y means 3 times x plus 2 times y. Replace x with 4 and y with -2 to get "
        "3(4) + 2(-2). Now multiply: 3(4) = 12 and 2(-2) = -4. Adding a negative number is the "
        "same as subtracting, so 12 + (-4) = 12 - 4 = 8. The value of the expression is 8. "
        "Whenever you see a variable, think of it as an empty box waiting for the number you are "
        "told to put in it."
    ),
    ("A", "S2"): (
        "You substituted correctly, so the only step left is handling the negative value. When "
        "you multiply a positive number by a negative number the product is negative: 2(-2) = -4. "
        "The expression becomes 3(4) + 2(-2) = 12 + (-4). Adding -4 is the same as subtracting 4, "
        "so 12 - 4 = 8. The value of the expression is 8. A quick rule to remember: positive "
        "times negative gives negative, and negative times negative gives positive."
    ),
    ("A", "S3"): (
        "Your answer of 8 is correct, and your instinct to check the order of operations is a "
        "good one. In 3x + 2y, multiplication binds before addition, so you evaluate 3(4) = 12 "
        "and 2(-2) = -4 first and only then add: 12 + (-4) = 8. Substitution followed by "
        "multiplication and then addition is exactly the right order here. To verify an "
        "evaluation like this, you can re-substitute into the original expression and recompute "
        "with different grouping; the result should not change."
    ),
    ("B", "S1"): (
        "The step you are stuck on is the distributive property, which comes from how algebraic "
        "expressions are built. 2(x - 3) means 2 times everything inside the parentheses, so "
        "multiply each term: 2 times x is 2x and 2 times -3 is -6, giving 2x - 6. The equation "
        "becomes 2x - 6 + 5 = 11. Combine the constants: -6 + 5 = -1, so 2x - 1 = 11. Add 1 to "
        "both sides to get 2x = 12, and divide both sides by 2 to find x = 6. Before moving on, "
        "review how the distributive property works on expressions such as 3(a + 2): every term "
        "inside the parentheses is multiplied by the factor outside."
    ),
    ("B", "S2"): (
        "Your distribution was right: 2(x - 3) + 5 = 11 becomes 2x - 6 + 5 = 11, that is "
        "2x - 1 = 11. Moving a term across the equals sign is really adding the same number to "
        "both sides, a property of equality. Here, add 1 to both sides: 2x - 1 + 1 = 11 + 1, so "
        "2x = 12. The -1 did not change sign by magic; the +1 cancelled it on the left and "
        "appeared on the right. Finally divide both sides by 2 to get x = 6. If you always write "
        "the operation applied to both sides, the sign changes take care of themselves."
    ),
    ("B", "S3"): (
        "To verify a solution, substitute it back into the original equation. With x = 6: "
        "2(6 - 3) + 5 = 2(3) + 5 = 6 + 5 = 11, which matches the right side, so x = 6 checks "
        "out. This works because solving preserved equality at every step: distribute to get "
        "2x - 6 + 5 = 11, simplify to 2x - 1 = 11, add 1 to both sides for 2x = 12, divide by 2 "
        "for x = 6. Substitution into the original equation, not an intermediate line, is the "
        "strongest check because it also catches simplification mistakes."
    ),
    ("C", "S1"): (
        "A system of two equations just means both statements are true about the same x and y, "
        "so let us reduce it to a single equation you already know how to solve. Notice the "
        "y-terms: +2y in the first equation and -2y in the second. Adding the equations term by "
        "term makes the y-terms cancel: (x + 2y) + (3x - 2y) = 7 + 5, so 4x = 12. This is now an "
        "ordinary linear equation; divide both sides by 4 to get x = 3. Substitute x = 3 into "
        "the first equation: 3 + 2y = 7, so 2y = 4 and y = 2. The solution is the pair (3, 2), "
        "and it satisfies both equations. Before trying more systems, review how to solve "
        "one-variable equations and how like terms combine in an expression, because elimination "
        "always ends with those two skills."
    ),
    ("C", "S2"): (
        "Adding the two equations helps because equality is preserved: if x + 2y = 7 and "
        "3x - 2y = 5, then the sum of the left sides must equal the sum of the right sides. "
        "Adding gives (x + 2y) + (3x - 2y) = 7 + 5. The +2y and -2y are opposites, so they "
        "cancel and leave 4x = 12, an equation in one variable with solution x = 3. Graphically "
        "the two equations are two lines, and combining them this way produces another line "
        "through their intersection point, which is why no information is lost. Substituting "
        "x = 3 back into x + 2y = 7 gives 2y = 4, so y = 2. The solution (3, 2) is the point "
        "where the two lines cross."
    ),
    ("C", "S3"): (
        "Elimination was a good choice here because the coefficients of y are already opposites, "
        "so one addition gives 4x = 12, x = 3, and then y = 2 from x + 2y = 7. Substitution is "
        "usually better when one equation is already solved for a variable or has a coefficient "
        "of 1: from x + 2y = 7 you could write x = 7 - 2y and substitute into 3x - 2y = 5, "
        "giving 21 - 6y - 2y = 5, so 8y = 16 and y = 2. Both methods land on (3, 2). As a rule "
        "of thumb, scan for a lone variable first; if there is none, line up a coefficient pair "
        "you can cancel, as you did."
    ),
}

REFRESHERS = {
    ("A", "S1"): (
        "Refresher on Algebraic Expressions. An algebraic expression combines numbers, variables "
        "and operations, such as 3x + 2y. The coefficient 3 means 3 times x. To evaluate an "
        "expression you substitute a number for each variable and follow the order of "
        "operations: multiply first, then add. Worked example: evaluate 5a - 2b for a = 2 and "
        "b = 3. Substitute to get 5(2) - 2(3) = 10 - 6 = 4. Watch the signs when a value is "
        "negative: 2(-2) = -4, and adding -4 is the same as subtracting 4."
    ),
    ("B", "S1"): (
        "Refresher on Algebraic Expressions: an expression such as 2(x - 3) + 5 is built from "
        "terms, and the distributive property expands 2(x - 3) into 2x - 6. Worked example: "
        "3(a + 4) = 3a + 12. Refresher on Properties of Real Numbers: the properties of equality "
        "let you add, subtract, multiply or divide both sides of an equation by the same number "
        "without changing its solutions, and the commutative and associative properties let you "
        "reorder and regroup terms, so 2x - 6 + 5 simplifies to 2x - 1. Worked example: from "
        "b - 4 = 9, add 4 to both sides to get b = 13."
    ),
    ("B", "S2"): (
        "Refresher on Properties of Real Numbers. The addition property of equality says you may "
        "add the same number to both sides of an equation; that is what moving a term really is. "
        "From 2x - 1 = 11, add 1 to both sides: 2x = 12. The division property then gives "
        "x = 6. Worked example: from 3c + 5 = 20, subtract 5 from both sides to get 3c = 15, "
        "then divide by 3 to get c = 5. Nothing changes sign on its own; each change is an "
        "operation applied to both sides."
    ),
    ("B", "S3"): (
        "Refresher on Solving Equations. Solving an equation means finding every value that "
        "makes it true. Work by inverse operations: undo addition with subtraction and undo "
        "multiplication with division, applying each operation to both sides. Worked example: "
        "solve 2(x - 3) + 5 = 11. Distribute: 2x - 6 + 5 = 11, so 2x - 1 = 11. Add 1 to both "
        "sides: 2x = 12. Divide by 2: x = 6. Always check by substituting into the original "
        "equation: 2(6 - 3) + 5 = 11."
    ),
    ("C", "S1"): (
        "Refresher on Solving Equations: isolate the variable with inverse operations applied to "
        "both sides; from 4x = 12 divide by 4 to get x = 3. Refresher on Algebraic Expressions: "
        "terms combine only when they are like terms, and opposites such as +2y and -2y sum to "
        "zero; worked example, (x + 2y) + (3x - 2y) = 4x. Refresher on Linear Equations: an "
        "equation such as x + 2y = 7 describes a line, and every point (x, y) on the line "
        "satisfies it; worked example, the point (3, 2) satisfies x + 2y = 7 because 3 + 4 = 7."
    ),
    ("C", "S2"): (
        "Refresher on Graphing Systems of Equations: a system is two lines drawn on the same "
        "axes, and a solution of the system is a point lying on both lines, their intersection. "
        "Worked example: x + 2y = 7 and 3x - 2y = 5 cross at (3, 2). Refresher on Linear "
        "Equations: each equation alone has infinitely many solutions forming a line; combining "
        "equations with equality-preserving operations, such as adding them, keeps the "
        "intersection point while producing simpler equations like 4x = 12."
    ),
    ("C", "S3"): (
        "Refresher on Graphing Systems of Equations. Two linear equations describe two lines; "
        "the system's solution is where they intersect. If the lines are parallel there is no "
        "solution, and if they coincide there are infinitely many. Worked example: graph "
        "x + 2y = 7 (through (7, 0) and (0, 3.5)) and 3x - 2y = 5 (through (3, 2) and (1, -1)); "
        "the lines cross at (3, 2), so that pair solves both equations. Algebraic methods like "
        "elimination find this same intersection without drawing."
    ),
}

FOLLOWUP_RESPONSE = (
    "Think of multiplication by a negative number as reversing direction on the number line. "
    "Multiplying by -1 flips a number to its opposite: (-1)(4) = -4. Multiplying two negatives "
    "flips twice, which lands you back on the positive side: (-2)(-3) first takes 2(-3) = -6 and "
    "then reverses it, giving 6. You can also see it through patterns: 3(-2) = -6, 2(-2) = -4, "
    "1(-2) = -2, 0(-2) = 0; each step adds 2, so continuing the pattern gives (-1)(-2) = 2. In "
    "your expression only one factor was negative, 2(-2) = -4, which is why that term came out "
    "negative."
)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(REPO / "data" / "cassettes"))
    args = parser.parse_args()

    graph = load_graph(REPO / "data" / "algebra2.kg.json")
    out = Path(args.out)
    latency = 1800.0
    written = []

    def record(prompt, response_text):
        nonlocal latency
        latency += 37.0
        artifact = FeedbackArtifact(
            request=CompletionRequest(prompt=prompt),
            response_text=response_text,
            latency_ms=latency,
            timestamp=RECORDED_AT,
            cassette_key="",
        )
        written.append(record_cassette(artifact, out))

    band_questions = {"A": "q-1-2-1", "B": "q-1-3-1", "C": "q-3-2-1"}
    for band in BANDS:
        question = graph.question(band_questions[band.value])
        for profile in PROFILES:
            _, impasse = load_impasse_file(REPO / "data" / "impasses" / f"{band.value}_{profile.value}.json", graph)
            titles = tuple(t for _, t in impasse.ranked_prerequisites)
            p1 = render_p1(
                PromptRequest(
                    question_text=question.text,
                    standard_solution=question.standard_solution,
                    impasse_text=impasse.impasse_text,
                    ranked_prerequisites=titles,
                )
            )
            record(p1, FEEDBACK[(band.value, profile.value)])

            refresher = render_refresher(question, titles, graph.concept(question.concept_id).title)
            if (band.value, profile.value) in REFRESHERS:
                record(refresher, REFRESHERS[(band.value, profile.value)])

        followup = render_p1(
            PromptRequest(
                question_text=question.text,
                standard_solution=question.standard_solution,
                impasse_text=FOLLOWUP_INPUT,
                ranked_prerequisites=(),
            )
        )
        if band.value == "A":
            record(followup, FOLLOWUP_RESPONSE)

    print(f"wrote {len(written)} cassettes to {out}")
    for key in written:
        print(f"  {key}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
