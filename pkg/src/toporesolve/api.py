"""Resolver dispatch and the resolutions JSON payload shared by CLI and server."""

from __future__ import annotations

import json
from typing import Any, Optional, Sequence

from .cbh import CbhConfig, Interpretation, ResolvedToponym, Source, preliminary_resolve, resolve_cbh
from .chf import DEFAULT_TAU, ChfConfig, resolve_chf
from .corpus import Document
from .gazetteer import Gazetteer, normalize_name
from .shs import resolve_shs

RESOLVERS = ("preliminary", "cbh", "shs", "chf")


def resolve_document(doc: Document, g: Gazetteer, resolver: str = "chf",
                     tau: float = DEFAULT_TAU, max_iterations: int = 2) -> list[ResolvedToponym]:
    if resolver == "preliminary":
        return preliminary_resolve(doc, g)
    if resolver == "cbh":
        return resolve_cbh(doc, g, CbhConfig(max_iterations=max_iterations))
    if resolver == "shs":
        return resolve_shs(doc, g)
    if resolver == "chf":
        return resolve_chf(doc, g, ChfConfig(tau=tau, cbh=CbhConfig(max_iterations=max_iterations)))
    raise ValueError(f"unknown resolver {resolver!r}; choose from {', '.join(RESOLVERS)}")


def resolution_records(results: Sequence[ResolvedToponym]) -> list[dict[str, Any]]:
    out = []
    for r in results:
        e = r.interpretation.entry if r.interpretation is not None else None
        out.append({
            "surface": r.group.surface,
            "mentions": list(r.group.members),
            "geonames_id": e.id if e else None,
            "lat": e.latitude if e else None,
            "lon": e.longitude if e else None,
            "confidence": r.confidence,
            "source": r.source.value,
        })
    return out


def dumps(payload: Any) -> str:
    """Canonical JSON encoding used for every emitted payload."""
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def corpus_payload(docs: Sequence[Document], results: Sequence[Sequence[ResolvedToponym]]) -> dict:
    return {"documents": [{"doc_id": d.doc_id, "resolutions": resolution_records(r)}
                          for d, r in zip(docs, results)]}


def predictions_from_payload(payload: dict, docs: Sequence[Document],
                             g: Gazetteer) -> list[list[ResolvedToponym]]:
    """Rebuild per-document results from a resolutions payload.

    Raises ``ValueError`` naming the document when the payload does not line
    up with the corpus.
    """
    by_id = {d["doc_id"]: d["resolutions"] for d in payload.get("documents", [])}
    out = []
    for doc in docs:
        if doc.doc_id not in by_id:
            raise ValueError(f"no resolutions for document {doc.doc_id!r}")
        recs = {normalize_name(r["surface"]): r for r in by_id[doc.doc_id]}
        results = []
        for grp in doc.groups():
            rec: Optional[dict] = recs.get(grp.key)
            if rec is None:
                raise ValueError(f"document {doc.doc_id!r}: no resolution for {grp.surface!r}")
            interp = None
            if rec.get("geonames_id") is not None:
                entry = g.get(rec["geonames_id"])
                if entry is None:
                    raise ValueError(f"document {doc.doc_id!r}: id {rec['geonames_id']} "
                                     f"not in gazetteer")
                interp = Interpretation(entry, g.hierarchy_of(entry))
            results.append(ResolvedToponym(grp, interp, float(rec.get("confidence", 0.0)),
                                           Source(rec.get("source", "Fallback"))))
        out.append(results)
    return out
