#!/usr/bin/env python3
"""Walk the shipped Algebra 2 prerequisite graph.

Loads the hand-authored graph document, shows how difficulty bands fall out
of graph position alone, and traces the prerequisite closure of the hard
question's concept.
"""

from pathlib import Path

from aisensei.kgraph import (
    classify_difficulty,
    load_graph,
    prerequisite_closure,
    prerequisite_distances,
    questions_for_band,
    DifficultyBand,
)

DATA = Path(__file__).resolve().parent.parent / "data"

g = load_graph(DATA / "algebra2.kg.json")
print(f"loaded {len(g.concepts)} concepts, {len(g.edges)} prerequisite edges\n")

print("difficulty band per concept (A = no prerequisites, C = terminal advanced):")
for cid in sorted(g.concepts):
    concept = g.concept(cid)
    band = classify_difficulty(g, cid)
    print(f"  {cid}  {band.value}  {concept.title}")

print("\nprerequisite closure of 3-2 (nearest first, ids break ties):")
for cid in prerequisite_closure(g, "3-2"):
    dist = prerequisite_distances(g, "3-2")[cid]
    print(f"  distance {dist}: {cid} {g.concept(cid).title}")

print("\nquestions by band:")
for band in DifficultyBand:
    for q in questions_for_band(g, band):
        print(f"  [{band.value}] {q.id}: {q.text}")
