"""Spatial-hierarchy sets and conflict-free covering.

Every candidate interpretation is hung under its nearest defined ancestor
(county, else state, else country, else a synthetic world root).  Each
parent with its children is one set; a set covers a toponym when one of its
mentioned nodes is an interpretation of it.  A cover picks sets so that no
toponym is covered twice, which keeps one sense per referent.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Optional

from .cbh import Interpretation, ResolvedToponym, Source, candidates, most_populous
from .corpus import Document
from .gazetteer import Gazetteer

WORLD_ID = 0
DEFAULT_ORACLE_LIMIT = 16


class CoverTooLarge(ValueError):
    pass


@dataclass
class SetNode:
    """A gazetteer node inside a hierarchy set.

    ``surfaces`` holds the mention-group keys this node is an interpretation
    of; it is empty for nodes that are not mentioned.
    """

    id: int
    population: int = 0
    surfaces: set[str] = field(default_factory=set)
    interpretation: Optional[Interpretation] = None

    @property
    def mentioned(self) -> bool:
        return bool(self.surfaces)


@dataclass
class HierarchySet:
    root: SetNode
    children: list[SetNode]
    weight: float = 1.0

    @property
    def root_id(self) -> int:
        return self.root.id

    def nodes(self) -> list[SetNode]:
        return [self.root, *self.children]

    def surfaces(self) -> set[str]:
        out: set[str] = set()
        for node in self.nodes():
            out |= node.surfaces
        return out

    @property
    def total_population(self) -> int:
        return sum(n.population for n in self.nodes() if n.mentioned)

    def node_for(self, surface: str) -> Optional[SetNode]:
        hits = [n for n in self.nodes() if surface in n.surfaces]
        return min(hits, key=lambda n: (-n.population, n.id)) if hits else None


@dataclass
class CoverProblem:
    universe: list[str]
    sets: list[HierarchySet]

    @property
    def color_classes(self) -> dict[str, set[tuple[int, int]]]:
        out: dict[str, set[tuple[int, int]]] = {u: set() for u in self.universe}
        for i, s in enumerate(self.sets):
            for node in s.nodes():
                for surf in node.surfaces:
                    out.setdefault(surf, set()).add((i, node.id))
        return out

    def to_json(self) -> dict[str, Any]:
        sets = []
        for s in self.sets:
            children = [{"id": c.id, "surface": surf, "population": c.population}
                        for c in s.children for surf in sorted(c.surfaces)]
            item: dict[str, Any] = {"root": s.root.id, "mentioned": s.root.mentioned,
                                    "children": children}
            if s.root.mentioned:
                item["root_surfaces"] = sorted(s.root.surfaces)
                item["root_population"] = s.root.population
            if s.weight != 1.0:
                item["weight"] = s.weight
            sets.append(item)
        return {"universe": list(self.universe), "sets": sets}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "CoverProblem":
        sets = []
        for raw in data["sets"]:
            children: dict[int, SetNode] = {}
            for c in raw["children"]:
                node = children.setdefault(c["id"], SetNode(c["id"], c.get("population", 0)))
                node.surfaces.add(c["surface"])
            root = SetNode(raw["root"], raw.get("root_population", 0),
                           set(raw.get("root_surfaces", [])))
            sets.append(HierarchySet(root, list(children.values()), raw.get("weight", 1.0)))
        return cls(list(data["universe"]), sets)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)


@dataclass
class Cover:
    chosen: list[int]
    assignment: dict[str, Optional[tuple[int, SetNode]]]

    @property
    def covered(self) -> set[str]:
        return {s for s, a in self.assignment.items() if a is not None}

    def weight(self, problem: CoverProblem) -> float:
        return sum(problem.sets[i].weight for i in self.chosen)


def generate_sets(doc: Document, g: Gazetteer) -> CoverProblem:
    """Build one set per distinct parent over all candidate interpretations."""
    universe: list[str] = []
    by_root: dict[int, HierarchySet] = {}
    interp_of: dict[int, set[str]] = {}
    interps: dict[int, Interpretation] = {}

    for grp in doc.groups():  # groups are already unique per surface
        universe.append(grp.key)
        for c in candidates(grp, g):
            interp_of.setdefault(c.id, set()).add(grp.key)
            interps[c.id] = c
            parent = c.chain.parent()
            root_id = WORLD_ID if parent is None else parent
            hs = by_root.get(root_id)
            if hs is None:
                root_entry = g.get(root_id)
                root = SetNode(root_id, root_entry.population if root_entry else 0)
                hs = by_root[root_id] = HierarchySet(root, [])
            if all(ch.id != c.id for ch in hs.children):
                hs.children.append(SetNode(c.id, c.population, interpretation=c))

    for hs in by_root.values():
        for ch in hs.children:
            ch.surfaces = set(interp_of[ch.id])
        if hs.root.id in interp_of:
            hs.root.surfaces = set(interp_of[hs.root.id])
            hs.root.interpretation = interps[hs.root.id]
    return CoverProblem(universe, list(by_root.values()))


def _assign(problem: CoverProblem, chosen: list[int]) -> Cover:
    assignment: dict[str, Optional[tuple[int, SetNode]]] = {u: None for u in problem.universe}
    for i in chosen:
        hs = problem.sets[i]
        for surf in sorted(hs.surfaces()):
            if assignment.get(surf) is None:
                assignment[surf] = (i, hs.node_for(surf))
    return Cover(list(chosen), assignment)


def greedy_cover(problem: CoverProblem) -> Cover:
    """Repeatedly take the admissible set covering most uncovered toponyms.

    A set is admissible while none of its nodes resolves an already covered
    toponym.  Ties go to the larger mentioned population, then the smaller
    root id.
    """
    covered: set[str] = set()
    chosen: list[int] = []
    surfaces = [s.surfaces() for s in problem.sets]
    while True:
        best, best_key = None, None
        for i, hs in enumerate(problem.sets):
            if i in chosen or surfaces[i] & covered:
                continue
            gain = len(surfaces[i])
            if gain == 0:
                continue
            key = (-gain, -hs.total_population, hs.root_id, i)
            if best_key is None or key < best_key:
                best, best_key = i, key
        if best is None:
            break
        chosen.append(best)
        covered |= surfaces[best]
    return _assign(problem, chosen)


def brute_force_cover(problem: CoverProblem, limit: int = DEFAULT_ORACLE_LIMIT) -> Cover:
    """Exhaustive conflict-free cover for small instances.

    Maximizes covered toponyms, then minimizes total weight, then maximizes
    mentioned population, then prefers the lexicographically smallest index
    tuple.
    """
    n = len(problem.sets)
    if n > limit:
        raise CoverTooLarge(f"{n} sets exceeds oracle limit {limit}")
    surfaces = [s.surfaces() for s in problem.sets]
    useful = [i for i in range(n) if surfaces[i]]
    best_key, best = None, ()
    for r in range(len(useful) + 1):
        for combo in itertools.combinations(useful, r):
            seen: set[str] = set()
            ok = True
            for i in combo:
                if surfaces[i] & seen:
                    ok = False
                    break
                seen |= surfaces[i]
            if not ok:
                continue
            weight = sum(problem.sets[i].weight for i in combo)
            pop = sum(problem.sets[i].total_population for i in combo)
            key = (-len(seen), weight, -pop, combo)
            if best_key is None or key < best_key:
                best_key, best = key, combo
    return _assign(problem, list(best))


def check_cover(problem: CoverProblem, cover: Cover) -> None:
    """Raise AssertionError unless ``cover`` is conflict-free and sound."""
    owner: dict[str, int] = {}
    for i in cover.chosen:
        for surf in problem.sets[i].surfaces():
            if surf in owner:
                raise AssertionError(f"{surf!r} covered by sets {owner[surf]} and {i}")
            owner[surf] = i
    for surf, hit in cover.assignment.items():
        if hit is None:
            continue
        i, node = hit
        if i not in cover.chosen or surf not in node.surfaces:
            raise AssertionError(f"{surf!r} assigned to a node that does not resolve it")
        if node not in problem.sets[i].nodes():
            raise AssertionError(f"{surf!r} assigned to a node outside set {i}")


def resolve_shs(doc: Document, g: Gazetteer) -> list[ResolvedToponym]:
    problem = generate_sets(doc, g)
    cover = greedy_cover(problem)
    out = []
    for grp in doc.groups():
        hit = cover.assignment.get(grp.key)
        if hit is not None and hit[1].interpretation is not None:
            out.append(ResolvedToponym(grp, hit[1].interpretation, 0.0, Source.SHS))
        else:
            out.append(ResolvedToponym(grp, most_populous(candidates(grp, g)), 0.0,
                                       Source.FALLBACK))
    return out
