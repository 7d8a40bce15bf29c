"""Context-bound hypotheses: preliminary disambiguation plus the
inheritance / near-location probability model.

Evidence for an ancestor node (a county, state or country) is the set of
token positions where it is mentioned.  A position counts when the text
spells one of the node's names, or when another toponym of the document is
currently resolved to a place lying under that node.  Positions of the
toponym being resolved are never evidence for itself.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .corpus import Document, MentionGroup, mentions_of
from .gazetteer import Division, Gazetteer, GazetteerEntry, HierarchyChain

TIE_EPS = 1e-12


class Source(str, enum.Enum):
    PRELIMINARY = "Preliminary"
    CBH = "CBH"
    SHS = "SHS"
    FALLBACK = "Fallback"


@dataclass(frozen=True)
class Interpretation:
    entry: GazetteerEntry
    chain: HierarchyChain

    @property
    def id(self) -> int:
        return self.entry.id

    @property
    def population(self) -> int:
        return self.entry.population


@dataclass(frozen=True)
class ResolvedToponym:
    group: MentionGroup
    interpretation: Optional[Interpretation]
    confidence: float
    source: Source

    @property
    def key(self) -> str:
        return self.group.key


@dataclass(frozen=True)
class CbhConfig:
    max_iterations: int = 2
    divisions: tuple[Division, ...] = (Division.COUNTY, Division.STATE, Division.COUNTRY)
    # let resolved toponyms count as mentions of their ancestors
    resolved_context: bool = True

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if list(self.divisions) != sorted(self.divisions):
            raise ValueError("divisions must be ordered finest to coarsest")


def popularity_key(interp: Interpretation) -> tuple[int, int]:
    """Sort key implementing the global tie-break: population desc, id asc."""
    return (-interp.population, interp.id)


def candidates(group: MentionGroup | str, g: Gazetteer) -> list[Interpretation]:
    surface = group.surface if isinstance(group, MentionGroup) else group
    return [Interpretation(e, g.hierarchy_of(e)) for e in g.lookup(surface)]


def most_populous(cands: Sequence[Interpretation]) -> Optional[Interpretation]:
    return min(cands, key=popularity_key) if cands else None


def argmax_tiebreak(scores: Sequence[float], cands: Sequence[Interpretation]) -> int:
    """Index of the best score; near-ties go to the more populous, then lower id."""
    best = max(scores)
    tied = [i for i, s in enumerate(scores) if s >= best - TIE_EPS]
    return min(tied, key=lambda i: popularity_key(cands[i]))


class Evidence:
    """Token positions at which gazetteer nodes are mentioned in a document."""

    def __init__(self, doc: Document, g: Gazetteer,
                 resolution: Optional[Mapping[str, Optional[Interpretation]]] = None,
                 text_cache: Optional[dict[int, tuple[int, ...]]] = None):
        self.doc = doc
        self.g = g
        self._text = text_cache if text_cache is not None else {}
        self._resolved: dict[int, set[int]] = {}
        if resolution:
            for grp in doc.groups():
                interp = resolution.get(grp.key)
                if interp is None:
                    continue
                c = interp.chain
                for node in {c.leaf, c.county, c.state, c.country} - {None}:
                    self._resolved.setdefault(node, set()).update(grp.positions)

    def text_positions(self, node_id: int) -> tuple[int, ...]:
        hit = self._text.get(node_id)
        if hit is None:
            entry = self.g.get(node_id)
            hit = tuple(mentions_of(self.doc, entry.names())) if entry else ()
            self._text[node_id] = hit
        return hit

    def positions(self, node_id: int, exclude: Sequence[int] = ()) -> list[int]:
        pos = set(self.text_positions(node_id))
        pos |= self._resolved.get(node_id, set())
        pos.difference_update(exclude)
        return sorted(pos)


def _similarity(own: Sequence[int], other: Sequence[int]) -> float:
    """1 / min term distance over position pairs, 0 when there is no pair."""
    best = min((abs(a - b) for a in own for b in other if a != b), default=0)
    return 1.0 / best if best else 0.0


def _normalize(raw: np.ndarray) -> Optional[np.ndarray]:
    total = raw.sum()
    if total <= 0:
        return None
    return raw / total


def _tf_vector(ev: Evidence, group: MentionGroup, d: Division,
               cands: Sequence[Interpretation]) -> np.ndarray:
    out = np.zeros(len(cands))
    for j, c in enumerate(cands):
        node = c.chain.at(d)
        if node is not None:
            out[j] = len(ev.positions(node, exclude=group.positions))
    return out


def _sim_vector(ev: Evidence, group: MentionGroup, d: Division,
                cands: Sequence[Interpretation]) -> np.ndarray:
    out = np.zeros(len(cands))
    for j, c in enumerate(cands):
        node = c.chain.at(d)
        if node is not None:
            out[j] = _similarity(group.positions, ev.positions(node, exclude=group.positions))
    return out


def p_inh(doc: Document, group: MentionGroup, d: Division,
          cands: Sequence[Interpretation], g: Gazetteer,
          resolution: Optional[Mapping[str, Optional[Interpretation]]] = None,
          evidence: Optional[Evidence] = None) -> Optional[np.ndarray]:
    """Inheritance probabilities: ancestor term frequency, normalized.

    Returns ``None`` when no candidate's ancestor at ``d`` is mentioned.
    """
    ev = evidence or Evidence(doc, g, resolution)
    return _normalize(_tf_vector(ev, group, d, cands))


def p_near(doc: Document, group: MentionGroup, d: Division,
           cands: Sequence[Interpretation], g: Gazetteer,
           resolution: Optional[Mapping[str, Optional[Interpretation]]] = None,
           evidence: Optional[Evidence] = None) -> Optional[np.ndarray]:
    """Near-location probabilities: inverse minimum term distance, normalized."""
    ev = evidence or Evidence(doc, g, resolution)
    return _normalize(_sim_vector(ev, group, d, cands))


def entropy_weight(p: Optional[Sequence[float]]) -> float:
    """One minus the normalized Shannon entropy of ``p``.

    Uniform vectors give 0, one-hot vectors give 1, undefined gives 0.
    """
    if p is None:
        return 0.0
    p = np.asarray(p, dtype=float)
    n = p.size
    if n <= 1:
        return 1.0
    if np.all(p == p[0]):
        return 0.0
    nz = p[p > 0]
    h = float(-(nz * np.log(nz)).sum())
    return float(min(1.0, max(0.0, 1.0 - h / math.log(n))))


def combine(near: Optional[np.ndarray], inh: Optional[np.ndarray],
            weight: Optional[float] = None) -> Optional[np.ndarray]:
    """Mix near-location and inheritance vectors.

    ``weight`` defaults to :func:`entropy_weight` of ``near``.  When only one
    vector is defined it is returned unchanged.
    """
    if near is None and inh is None:
        return None
    if inh is None:
        return near
    if near is None:
        return inh
    j = entropy_weight(near) if weight is None else weight
    return j * near + (1.0 - j) * inh


def p_cb(doc: Document, group: MentionGroup, d: Division,
         cands: Sequence[Interpretation], g: Gazetteer,
         resolution: Optional[Mapping[str, Optional[Interpretation]]] = None,
         evidence: Optional[Evidence] = None) -> Optional[np.ndarray]:
    if not cands:
        return None
    ev = evidence or Evidence(doc, g, resolution)
    return combine(p_near(doc, group, d, cands, g, evidence=ev),
                   p_inh(doc, group, d, cands, g, evidence=ev))


def _candidate_table(doc: Document, g: Gazetteer) -> dict[str, list[Interpretation]]:
    return {grp.key: candidates(grp, g) for grp in doc.groups()}


def preliminary_resolve(doc: Document, g: Gazetteer,
                        cands: Optional[dict[str, list[Interpretation]]] = None,
                        evidence: Optional[Evidence] = None) -> list[ResolvedToponym]:
    """Score each interpretation by how closely its ancestors are mentioned.

    Every ancestor above the interpretation contributes the inverse of its
    smallest term distance to the toponym.  The highest total wins, ties go
    to the most populous interpretation.
    """
    cands = cands if cands is not None else _candidate_table(doc, g)
    ev = evidence or Evidence(doc, g)
    out = []
    for grp in doc.groups():
        cs = cands[grp.key]
        if not cs:
            out.append(ResolvedToponym(grp, None, 0.0, Source.FALLBACK))
            continue
        scores = []
        for c in cs:
            score = 0.0
            for node in c.chain.ancestor_ids():
                score += _similarity(grp.positions,
                                     [p for p in ev.text_positions(node)
                                      if p not in grp.positions])
            scores.append(score)
        best = cs[argmax_tiebreak(scores, cs)]
        out.append(ResolvedToponym(grp, best, 0.0, Source.PRELIMINARY))
    return out


@dataclass
class CbhTrace:
    """Per-iteration assignments (surface key -> entry id), for inspection."""

    preliminary: dict[str, Optional[int]] = field(default_factory=dict)
    iterations: list[dict[str, Optional[int]]] = field(default_factory=list)


def resolve_cbh(doc: Document, g: Gazetteer, cfg: CbhConfig = CbhConfig(),
                trace: Optional[CbhTrace] = None) -> list[ResolvedToponym]:
    """Preliminary resolution refined by the context-bound probabilities.

    Each iteration evaluates every division finest to coarsest against the
    assignment left by the previous iteration, and a defined division
    overwrites the choice made at a finer one.  At most
    ``cfg.max_iterations`` iterations run, so oscillating documents still
    terminate.
    """
    cands = _candidate_table(doc, g)
    text_cache: dict[int, tuple[int, ...]] = {}
    prelim = preliminary_resolve(doc, g, cands, Evidence(doc, g, text_cache=text_cache))
    current = {r.key: r.interpretation for r in prelim}
    if trace is not None:
        trace.preliminary = _ids(current)
    groups = doc.groups()
    vectors: dict[str, dict[Division, tuple[Sequence[Interpretation], np.ndarray]]] = {}

    for _ in range(cfg.max_iterations):
        ev = Evidence(doc, g, current if cfg.resolved_context else None, text_cache)
        nxt = dict(current)
        seen: dict[str, dict] = {}
        for d in cfg.divisions:
            for grp in groups:
                cs = cands[grp.key]
                p = p_cb(doc, grp, d, cs, g, evidence=ev)
                if p is None:
                    continue
                nxt[grp.key] = cs[argmax_tiebreak(list(p), cs)]
                seen.setdefault(grp.key, {})[d] = (cs, p)
        vectors.update(seen)
        if trace is not None:
            trace.iterations.append(_ids(nxt))
        converged = nxt == current
        current = nxt
        if converged:
            break

    out = []
    for r in prelim:
        interp = current[r.key]
        if r.key not in vectors or interp is None:
            out.append(r)
            continue
        conf = 0.0
        for cs, p in vectors[r.key].values():
            conf = max(conf, float(p[cs.index(interp)]))
        out.append(ResolvedToponym(r.group, interp, min(1.0, conf), Source.CBH))
    return out


def _ids(assign: Mapping[str, Optional[Interpretation]]) -> dict[str, Optional[int]]:
    return {k: (v.id if v is not None else None) for k, v in assign.items()}
