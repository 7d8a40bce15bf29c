"""
Greedy covering against the exact oracle
========================================

The greedy cover is fast but can lock itself out: once a set is taken,
every other set touching one of its names becomes inadmissible.  Compare it
to brute force on small random instances.
"""

import random
from collections import Counter

from toporesolve.shs import CoverProblem, HierarchySet, SetNode, brute_force_cover, greedy_cover

rnd = random.Random(8)


def random_problem(max_surfaces=8, max_sets=12):
    universe = [f"t{i}" for i in range(rnd.randint(1, max_surfaces))]
    n_sets = rnd.randint(1, max_sets)
    members = {}
    nid = 1
    for surf in universe:
        for _ in range(rnd.randint(1, 4)):
            members.setdefault(rnd.randrange(n_sets), []).append(
                SetNode(nid, rnd.randint(0, 10_000), {surf}))
            nid += 1
    return CoverProblem(universe, [HierarchySet(SetNode(1000 + r), ns)
                                   for r, ns in sorted(members.items())])


gaps = Counter()
worst = None
for _ in range(500):
    p = random_problem()
    gap = len(brute_force_cover(p).covered) - len(greedy_cover(p).covered)
    gaps[gap] += 1
    if worst is None or gap > worst[0]:
        worst = (gap, p)

print("surfaces lost by greedy vs oracle:", dict(sorted(gaps.items())))

###############################################################################
# The worst instance, set by set.
gap, p = worst
for i, s in enumerate(p.sets):
    print(i, sorted(s.surfaces()), "pop", s.total_population)
print("greedy", greedy_cover(p).chosen, "oracle", brute_force_cover(p).chosen)

###############################################################################
# The textbook trap: greedy takes the big middle set and then needs two
# singletons, where two disjoint halves would do.
trap = CoverProblem.from_json({"universe": list("123456"), "sets": [
    {"root": r, "mentioned": False,
     "children": [{"id": 10 * r + i, "surface": c, "population": 0} for i, c in enumerate(cs)]}
    for r, cs in enumerate(["123", "456", "1245", "3", "6", "1"], start=1)]})
print("trap: greedy uses", len(greedy_cover(trap).chosen),
      "sets, oracle uses", len(brute_force_cover(trap).chosen))
