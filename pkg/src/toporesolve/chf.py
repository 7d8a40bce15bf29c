"""Context-hierarchy fusion: trust CBH only above a confidence threshold."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cbh import CbhConfig, ResolvedToponym, Source, resolve_cbh
from .corpus import Document
from .gazetteer import Gazetteer
from .shs import resolve_shs

DEFAULT_TAU = 0.55


@dataclass(frozen=True)
class ChfConfig:
    tau: float = DEFAULT_TAU
    cbh: CbhConfig = field(default_factory=CbhConfig)

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau}")


def fuse(cbh: Sequence[ResolvedToponym], shs: Sequence[ResolvedToponym],
         tau: float) -> list[ResolvedToponym]:
    """Per group, the CBH result when its confidence exceeds ``tau``, else SHS."""
    if len(cbh) != len(shs):
        raise ValueError("CBH and SHS results cover different mention groups")
    out = []
    for c, s in zip(cbh, shs):
        if c.key != s.key:
            raise ValueError(f"mention groups out of order: {c.key!r} vs {s.key!r}")
        out.append(c if c.confidence > tau else s)
    return out


def resolve_chf(doc: Document, g: Gazetteer,
                cfg: Optional[ChfConfig] = None) -> list[ResolvedToponym]:
    cfg = cfg or ChfConfig()
    return fuse(resolve_cbh(doc, g, cfg.cbh), resolve_shs(doc, g), cfg.tau)


def chosen_source(r: ResolvedToponym) -> str:
    """Which resolver a fused result came from (Fallback counts as SHS)."""
    return "CBH" if r.source is Source.CBH else "SHS"
