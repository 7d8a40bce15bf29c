"""Scoring resolutions against gold annotations."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .cbh import CbhConfig, Interpretation, ResolvedToponym, resolve_cbh
from .chf import fuse
from .corpus import Document, GoldAnnotation
from .gazetteer import BoundingBox, Gazetteer, haversine_km, in_bounding_box
from .shs import resolve_shs

TEN_MILES_KM = 16.09
RELAXED_KM = 161.0


class Mode(str, enum.Enum):
    RESOL = "resol"
    GEOTAG = "geotag"


class Correctness(str, enum.Enum):
    DISTANCE = "distance"
    BBOX = "bbox"


class EvaluationError(ValueError):
    pass


class UnresolvableGold(LookupError):
    pass


@dataclass(frozen=True)
class EvalConfig:
    mode: Mode = Mode.RESOL
    correctness: Correctness = Correctness.DISTANCE
    threshold_km: float = RELAXED_KM

    def __post_init__(self):
        if self.threshold_km <= 0:
            raise ValueError("threshold_km must be positive")


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    mean_error_km: Optional[float]
    gold: int
    predicted: int
    correct: int
    excluded: int = 0

    @classmethod
    def from_counts(cls, gold: int, predicted: int, correct: int, excluded: int = 0,
                    errors: Sequence[float] = (), with_error: bool = True) -> "Metrics":
        p = correct / predicted if predicted else 0.0
        r = correct / gold if gold else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        mean = math.fsum(errors) / len(errors) if with_error and errors else None
        return cls(p, r, f1, mean, gold, predicted, correct, excluded)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_table(self) -> str:
        rows = [("precision", f"{self.precision:.4f}"), ("recall", f"{self.recall:.4f}"),
                ("f1", f"{self.f1:.4f}"),
                ("mean_error_km", "-" if self.mean_error_km is None
                 else f"{self.mean_error_km:.2f}"),
                ("gold", str(self.gold)), ("predicted", str(self.predicted)),
                ("correct", str(self.correct)), ("excluded", str(self.excluded))]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v:>10}" for k, v in rows)


def gold_coords(gold: GoldAnnotation, g: Gazetteer) -> Optional[tuple[float, float]]:
    if gold.coords is not None:
        return gold.coords
    entry = g.get(gold.gazetteer_id) if gold.gazetteer_id is not None else None
    return entry.coords if entry is not None else None


def gold_box(gold: GoldAnnotation, g: Gazetteer) -> Optional[BoundingBox]:
    entry = g.get(gold.gazetteer_id) if gold.gazetteer_id is not None else None
    return entry.bounding_box if entry is not None else None


def is_correct(pred: Interpretation, gold: GoldAnnotation, g: Gazetteer,
               cfg: EvalConfig) -> bool:
    target = gold_coords(gold, g)
    if target is None:
        raise UnresolvableGold(f"gold {gold} has no coordinates in this gazetteer")
    if cfg.correctness is Correctness.BBOX:
        box = gold_box(gold, g)
        if box is not None:
            return in_bounding_box(pred.entry.coords, box)
    return haversine_km(pred.entry.coords, target) <= cfg.threshold_km


def _aligned(doc: Document, preds: Sequence[ResolvedToponym]) -> dict[str, ResolvedToponym]:
    keys = [grp.key for grp in doc.groups()]
    if [r.key for r in preds] != keys:
        raise EvaluationError(f"predictions for document {doc.doc_id!r} do not match "
                              f"its mention groups")
    return {r.key: r for r in preds}


def _overlaps(a, b) -> bool:
    return a.char_start < b.char_end and b.char_start < a.char_end


def evaluate(corpus: Sequence[Document], predictions: Sequence[Sequence[ResolvedToponym]],
             g: Gazetteer, cfg: EvalConfig = EvalConfig(),
             recognized: Optional[Sequence[Document]] = None) -> Metrics:
    """Precision, recall, F1 and mean error distance over a corpus.

    In ``resol`` mode ``predictions`` align with the mention groups of
    ``corpus``.  In ``geotag`` mode they align with ``recognized`` (documents
    carrying recognizer output, matched to gold by ``doc_id``) and a
    prediction only counts when its span overlaps a gold mention.
    Gold mentions without resolvable coordinates are left out and counted
    in ``excluded``.
    """
    if len(predictions) != (len(recognized) if recognized is not None else len(corpus)):
        raise EvaluationError("number of prediction lists does not match the corpus")
    gold_n = predicted = correct = excluded = 0
    errors: list[float] = []

    if cfg.mode is Mode.RESOL or recognized is None:
        for doc, preds in zip(corpus, predictions):
            by_key = _aligned(doc, preds)
            for m in doc.toponyms:
                if m.gold is None or gold_coords(m.gold, g) is None:
                    excluded += 1
                    continue
                gold_n += 1
                interp = by_key[m.key].interpretation
                if interp is None:
                    continue
                predicted += 1
                errors.append(haversine_km(interp.entry.coords, gold_coords(m.gold, g)))
                correct += is_correct(interp, m.gold, g, cfg)
        return Metrics.from_counts(gold_n, predicted, correct, excluded, errors,
                                   with_error=cfg.mode is Mode.RESOL)

    gold_docs = {doc.doc_id: doc for doc in corpus}
    for doc in corpus:
        for m in doc.toponyms:
            if m.gold is None or gold_coords(m.gold, g) is None:
                excluded += 1
            else:
                gold_n += 1
    for rdoc, preds in zip(recognized, predictions):
        by_key = _aligned(rdoc, preds)
        gdoc = gold_docs.get(rdoc.doc_id)
        pool = [] if gdoc is None else [
            m for m in gdoc.toponyms if m.gold is not None and gold_coords(m.gold, g)]
        used: set[int] = set()
        for m in rdoc.toponyms:
            interp = by_key[m.key].interpretation
            if interp is None:
                continue
            predicted += 1
            for k, gm in enumerate(pool):
                if k not in used and _overlaps(m, gm) and is_correct(interp, gm.gold, g, cfg):
                    used.add(k)
                    correct += 1
                    break
    return Metrics.from_counts(gold_n, predicted, correct, excluded, with_error=False)


def tau_sweep(corpus: Sequence[Document], g: Gazetteer, cbh_cfg: CbhConfig,
              taus: Sequence[float], cfg: EvalConfig = EvalConfig()) -> list[tuple[float, Metrics]]:
    """Evaluate fusion at each threshold, resolving CBH and SHS only once."""
    taus = list(taus)
    if any(b < a for a, b in zip(taus, taus[1:])):
        raise ValueError("taus must be sorted ascending")
    if any(not 0.0 <= t <= 1.0 for t in taus):
        raise ValueError("taus must lie in [0, 1]")
    cbh = [resolve_cbh(doc, g, cbh_cfg) for doc in corpus]
    shs = [resolve_shs(doc, g) for doc in corpus]
    return [(tau, evaluate(corpus, [fuse(c, s, tau) for c, s in zip(cbh, shs)], g, cfg))
            for tau in taus]


def parse_sweep(arg: str) -> list[float]:
    """Expand ``"a:b:step"`` into an inclusive ascending list of thresholds."""
    try:
        a, b, step = (float(x) for x in arg.split(":"))
    except ValueError:
        raise ValueError(f"bad sweep range {arg!r}, expected a:b:step") from None
    if step <= 0 or b < a:
        raise ValueError(f"bad sweep range {arg!r}")
    n = int(math.floor((b - a) / step + 1e-9))
    return [round(a + k * step, 10) for k in range(n + 1)]


def sweep_csv(rows: Sequence[tuple[float, Metrics]]) -> str:
    lines = ["tau,precision,recall,f1"]
    lines += [f"{tau:.4f},{m.precision:.6f},{m.recall:.6f},{m.f1:.6f}" for tau, m in rows]
    return "\n".join(lines) + "\n"
