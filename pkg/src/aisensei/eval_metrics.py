"""Text-similarity and rater-agreement metrics.

ROUGE scores are computed over a fixed canonical tokenization (lowercase,
split on runs of non-alphanumeric characters, no stemming or stopword
removal) so numbers are comparable across runs and machines. Agreement
statistics treat Likert values as nominal categories (unweighted kappa).
"""

from __future__ import annotations

import csv
import enum
import io
import logging
import re
import statistics
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Optional, Sequence, Union

from .kgraph import DifficultyBand
from .student_model import StudentProfile

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[a-z0-9]+")

ROUGE_1 = "rouge-1"
ROUGE_2 = "rouge-2"
ROUGE_L = "rouge-l"

# Canonical label ordering for similarity tables: the standard solution first,
# then the student profiles.
LABEL_ORDER = ("S", "S1", "S2", "S3")

MATRIX_CSV_HEADER = ("pair", "metric", "recall", "precision", "f_score")


class DuplicateLabelError(ValueError):
    """Two texts in a similarity table carry the same label."""


class LengthMismatchError(ValueError):
    """Rating vectors that must align item-by-item have different lengths."""


class KappaMethod(str, enum.Enum):
    PairwiseMeanCohen = "pairwise"
    Fleiss = "fleiss"


class RubricMetric(str, enum.Enum):
    Correctness = "correctness"
    Precision = "precision"
    Hallucination = "hallucination"
    Variability = "variability"


@dataclass(frozen=True)
class RougeScore:
    recall: float
    precision: float
    f_score: float

    @classmethod
    def from_counts(cls, overlap: float, ref_total: int, cand_total: int) -> "RougeScore":
        recall = overlap / ref_total if ref_total else 0.0
        precision = overlap / cand_total if cand_total else 0.0
        f = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
        return cls(recall=recall, precision=precision, f_score=f)


@dataclass(frozen=True)
class RatingRecord:
    rater_id: str
    question_band: DifficultyBand
    profile: StudentProfile
    metric: RubricMetric
    value: int

    def __post_init__(self):
        if self.value not in (1, 2, 3, 4, 5):
            raise ValueError(f"rating value must be 1..5, got {self.value!r}")


@dataclass(frozen=True)
class RatingSummary:
    mean: float
    sd: float
    count: int


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any run of non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(reference: Sequence[str], candidate: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram multiset overlap between two token sequences."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ref_grams = _ngrams(reference, n)
    cand_grams = _ngrams(candidate, n)
    overlap = sum(min(count, ref_grams[gram]) for gram, count in cand_grams.items())
    return RougeScore.from_counts(overlap, sum(ref_grams.values()), sum(cand_grams.values()))


def rouge_l(reference: Sequence[str], candidate: Sequence[str]) -> RougeScore:
    """Longest-common-subsequence overlap over the full token sequences."""
    lcs = _lcs_length(reference, candidate)
    return RougeScore.from_counts(lcs, len(reference), len(candidate))


def _lcs_length(xs: Sequence[str], ys: Sequence[str]) -> int:
    # Rolling single-row DP.
    if not xs or not ys:
        return 0
    row = [0] * (len(ys) + 1)
    for x in xs:
        prev = 0
        for j, y in enumerate(ys, start=1):
            cur = row[j]
            row[j] = prev + 1 if x == y else max(row[j], row[j - 1])
            prev = cur
    return row[-1]


TextTable = Union[Mapping[str, str], Sequence[tuple[str, str]]]
MatrixKey = tuple[str, str, str]  # (reference label, candidate label, metric)


def pairwise_matrix(
    texts: TextTable,
    ns: Sequence[int] = (1, 2),
    include_l: bool = True,
    versus: Optional[str] = None,
) -> dict[MatrixKey, RougeScore]:
    """ROUGE scores for every unordered pair of labeled texts.

    Labels are ordered canonically (S, S1, S2, S3, then anything else) and the
    earlier label of each pair acts as the reference. With ``versus`` set,
    only pairs (versus, other) are produced - the standard-solution-vs-feedback
    table shape.
    """
    items = list(texts.items()) if isinstance(texts, Mapping) else list(texts)
    labels = [label for label, _ in items]
    if len(labels) != len(set(labels)):
        dupes = sorted({l for l in labels if labels.count(l) > 1})
        raise DuplicateLabelError(f"duplicate labels: {dupes}")
    if len(items) < 2:
        raise ValueError("need at least two labeled texts")
    if versus is not None and versus not in labels:
        raise ValueError(f"versus label {versus!r} not present")

    ordered = sorted(items, key=lambda kv: _label_rank(kv[0]))
    token_map = {label: tokenize(text) for label, text in ordered}
    ordered_labels = [label for label, _ in ordered]

    if versus is None:
        pairs = list(combinations(ordered_labels, 2))
    else:
        pairs = [(versus, other) for other in ordered_labels if other != versus]

    matrix: dict[MatrixKey, RougeScore] = {}
    for ref_label, cand_label in pairs:
        ref, cand = token_map[ref_label], token_map[cand_label]
        for n in ns:
            matrix[(ref_label, cand_label, f"rouge-{n}")] = rouge_n(ref, cand, n)
        if include_l:
            matrix[(ref_label, cand_label, ROUGE_L)] = rouge_l(ref, cand)
    return matrix


def _label_rank(label: str) -> tuple[int, str]:
    try:
        return (LABEL_ORDER.index(label), label)
    except ValueError:
        return (len(LABEL_ORDER), label)


def _metric_rank(metric: str) -> tuple[int, str]:
    order = (ROUGE_1, ROUGE_2, ROUGE_L)
    return (order.index(metric), metric) if metric in order else (len(order), metric)


def matrix_rows(matrix: Mapping[MatrixKey, RougeScore]) -> list[tuple[str, str, RougeScore]]:
    """Flatten a matrix to ("S vs S1", "rouge-1", score) rows in table order."""
    keys = sorted(
        matrix,
        key=lambda k: (_label_rank(k[0]), _label_rank(k[1]), _metric_rank(k[2])),
    )
    return [(f"{ref} vs {cand}", metric, matrix[(ref, cand, metric)]) for ref, cand, metric in keys]


def render_matrix_text(matrix: Mapping[MatrixKey, RougeScore], title: str = None) -> str:
    """Aligned plain-text table with two-decimal scores."""
    rows = matrix_rows(matrix)
    pair_w = max([len(r[0]) for r in rows] + [4])
    lines = []
    if title:
        lines.append(title)
    for pair, metric, score in rows:
        lines.append(
            f"{pair:<{pair_w}}  {metric:<7}  {score.recall:.2f}  {score.precision:.2f}  {score.f_score:.2f}"
        )
    return "\n".join(lines) + "\n"


def render_matrix_csv(matrix: Mapping[MatrixKey, RougeScore]) -> str:
    """CSV with the fixed header pair,metric,recall,precision,f_score."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MATRIX_CSV_HEADER)
    for pair, metric, score in matrix_rows(matrix):
        writer.writerow([pair, metric, repr(score.recall), repr(score.precision), repr(score.f_score)])
    return buf.getvalue()


def cohens_kappa(ratings_a: Sequence[Hashable], ratings_b: Sequence[Hashable]) -> float:
    """Chance-corrected agreement between two aligned rating vectors.

    When chance agreement is already 1 (both raters constant on one shared
    category) the statistic is undefined; by convention we return 1.0 on
    perfect agreement and 0.0 otherwise, and log the degenerate case.
    """
    if len(ratings_a) != len(ratings_b):
        raise LengthMismatchError(f"rating vectors differ in length: {len(ratings_a)} vs {len(ratings_b)}")
    if not ratings_a:
        raise LengthMismatchError("rating vectors must be non-empty")

    n = len(ratings_a)
    p_o = sum(a == b for a, b in zip(ratings_a, ratings_b)) / n
    counts_a = Counter(ratings_a)
    counts_b = Counter(ratings_b)
    p_e = sum((counts_a[c] / n) * (counts_b[c] / n) for c in counts_a.keys() | counts_b.keys())
    if p_e >= 1.0:
        log.warning("degenerate kappa: chance agreement is 1 (constant ratings)")
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1.0 - p_e)


def multi_rater_kappa(
    ratings: Sequence[Sequence[Hashable]],
    method: KappaMethod = KappaMethod.PairwiseMeanCohen,
) -> float:
    """Agreement across two or more raters.

    PairwiseMeanCohen averages Cohen's kappa over all rater pairs; Fleiss
    computes the standard multi-rater kappa over the item-by-category table.
    Two raters reduce to the plain two-rater statistic under both methods.
    """
    if len(ratings) < 2:
        raise LengthMismatchError("need at least two raters")
    lengths = {len(r) for r in ratings}
    if len(lengths) != 1:
        raise LengthMismatchError(f"rater vectors differ in length: {sorted(lengths)}")
    if 0 in lengths:
        raise LengthMismatchError("rating vectors must be non-empty")

    method = KappaMethod(method)
    if method is KappaMethod.PairwiseMeanCohen:
        pairs = list(combinations(range(len(ratings)), 2))
        return sum(cohens_kappa(ratings[i], ratings[j]) for i, j in pairs) / len(pairs)
    return _fleiss_kappa(ratings)


def _fleiss_kappa(ratings: Sequence[Sequence[Hashable]]) -> float:
    n_raters = len(ratings)
    n_items = len(ratings[0])
    categories = sorted({v for vec in ratings for v in vec}, key=repr)
    cat_index = {c: i for i, c in enumerate(categories)}

    table = [[0] * len(categories) for _ in range(n_items)]
    for vec in ratings:
        for item, value in enumerate(vec):
            table[item][cat_index[value]] += 1

    p_bar = sum(
        (sum(c * c for c in row) - n_raters) / (n_raters * (n_raters - 1))
        for row in table
    ) / n_items
    totals = [sum(row[j] for row in table) for j in range(len(categories))]
    grand = n_items * n_raters
    p_e = sum((t / grand) ** 2 for t in totals)
    if p_e >= 1.0:
        log.warning("degenerate kappa: chance agreement is 1 (constant ratings)")
        return 1.0 if p_bar == 1.0 else 0.0
    return (p_bar - p_e) / (1.0 - p_e)


def rating_stats(records: Iterable[RatingRecord]) -> dict[tuple, RatingSummary]:
    """Mean and sample standard deviation per (band, profile, metric) cell."""
    groups: dict[tuple, list[int]] = {}
    for rec in records:
        groups.setdefault((rec.question_band, rec.profile, rec.metric), []).append(rec.value)
    out = {}
    for key, values in groups.items():
        sd = statistics.stdev(values) if len(values) > 1 else 0.0
        out[key] = RatingSummary(mean=statistics.mean(values), sd=sd, count=len(values))
    return out


def load_ratings_csv(source: Union[str, Path]) -> list[RatingRecord]:
    """Read rating records from CSV with columns rater_id,band,profile,metric,value."""
    records = []
    with open(source, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            records.append(
                RatingRecord(
                    rater_id=row["rater_id"].strip(),
                    question_band=DifficultyBand(row["band"].strip().upper()),
                    profile=StudentProfile(row["profile"].strip().upper()),
                    metric=RubricMetric(row["metric"].strip().lower()),
                    value=int(row["value"]),
                )
            )
    return records


def kappa_by_band(
    records: Iterable[RatingRecord],
    method: KappaMethod = KappaMethod.PairwiseMeanCohen,
) -> dict[DifficultyBand, float]:
    """Inter-rater agreement per question band over (profile, metric) items.

    Every rater must have rated every (profile, metric) cell present for the
    band, so the per-rater vectors align item-by-item.
    """
    by_band: dict[DifficultyBand, dict[str, dict[tuple, int]]] = {}
    for rec in records:
        by_band.setdefault(rec.question_band, {}).setdefault(rec.rater_id, {})[(rec.profile, rec.metric)] = rec.value

    out: dict[DifficultyBand, float] = {}
    for band, raters in sorted(by_band.items()):
        items = sorted({key for cells in raters.values() for key in cells})
        vectors = []
        for rater_id in sorted(raters):
            cells = raters[rater_id]
            missing = [key for key in items if key not in cells]
            if missing:
                raise LengthMismatchError(
                    f"rater {rater_id!r} is missing {len(missing)} item(s) for band {band.value}"
                )
            vectors.append([cells[key] for key in items])
        out[band] = multi_rater_kappa(vectors, method=method)
    return out
