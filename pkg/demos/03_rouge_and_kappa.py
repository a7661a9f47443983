#!/usr/bin/env python3
"""The evaluation toolkit on small, inspectable inputs.

ROUGE scores for a toy reference/candidate pair, a pairwise similarity table,
rating statistics, and the two agreement statistics side by side.
"""

from pathlib import Path

from aisensei.eval_metrics import (
    KappaMethod,
    cohens_kappa,
    kappa_by_band,
    load_ratings_csv,
    multi_rater_kappa,
    pairwise_matrix,
    render_matrix_text,
    rouge_l,
    rouge_n,
    tokenize,
)

DATA = Path(__file__).resolve().parent.parent / "data"

ref = tokenize("Add one to both sides, then divide both sides by two.")
cand = tokenize("Divide both sides by two after adding one to both sides!")
print(f"reference tokens: {ref}")
print(f"candidate tokens: {cand}\n")
for name, score in (
    ("rouge-1", rouge_n(ref, cand, 1)),
    ("rouge-2", rouge_n(ref, cand, 2)),
    ("rouge-l", rouge_l(ref, cand)),
):
    print(f"  {name}: recall={score.recall:.2f} precision={score.precision:.2f} f={score.f_score:.2f}")

print("\npairwise table for three feedback variants:")
texts = {
    "S1": "substitute the value, multiply, then add the parts together",
    "S2": "multiply first and then add, watching the negative sign",
    "S3": "the order of operations puts multiplication before addition",
}
print(render_matrix_text(pairwise_matrix(texts)))

a = [5, 4, 4, 3, 5, 2]
b = [5, 4, 3, 3, 5, 2]
print(f"two raters over six items: cohen's kappa = {cohens_kappa(a, b):.3f}")
c = [5, 4, 4, 3, 4, 2]
print(f"three raters, pairwise mean = {multi_rater_kappa([a, b, c], KappaMethod.PairwiseMeanCohen):.3f}")
print(f"three raters, fleiss       = {multi_rater_kappa([a, b, c], KappaMethod.Fleiss):.3f}")

print("\nper-band agreement over the sample rating sheet:")
records = load_ratings_csv(DATA / "ratings.sample.csv")
for band, value in kappa_by_band(records).items():
    print(f"  band {band.value}: {value:.3f}")
