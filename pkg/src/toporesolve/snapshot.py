"""Compact gazetteer snapshots: a magic header, a format version, then a
gzip-compressed pickle of the entry records.

Snapshots are a local cache written by ``toporesolve index``; only load
files you produced yourself.
"""

from __future__ import annotations

import dataclasses
import gzip
import os
import pickle

from .gazetteer import Gazetteer, GazetteerEntry, IngestReport, ingest_path

MAGIC = b"TOPORESOLVE-GAZETTEER\n"
VERSION = 1
_FIELDS = [f.name for f in dataclasses.fields(GazetteerEntry)]


class SnapshotError(Exception):
    pass


def save_snapshot(g: Gazetteer, path) -> None:
    rows = [tuple(getattr(e, f) for f in _FIELDS) for e in g.entries.values()]
    body = gzip.compress(pickle.dumps((_FIELDS, rows, dataclasses.asdict(g.report)),
                                      protocol=4), mtime=0)
    with open(path, "wb") as fh:
        fh.write(MAGIC + f"{VERSION}\n".encode() + body)


def is_snapshot(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(len(MAGIC)) == MAGIC


def load_snapshot(path) -> Gazetteer:
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise SnapshotError(f"{path}: not a gazetteer snapshot")
        version = fh.readline().strip()
        if version != str(VERSION).encode():
            raise SnapshotError(f"{path}: snapshot version {version.decode(errors='replace')} "
                                f"unsupported (expected {VERSION})")
        fields, rows, report = pickle.loads(gzip.decompress(fh.read()))
    if fields != _FIELDS:
        raise SnapshotError(f"{path}: entry layout mismatch")
    g = Gazetteer(GazetteerEntry(*row) for row in rows)
    g.report = IngestReport(**report)
    return g


def load_gazetteer(path, bbox_path=None) -> Gazetteer:
    """Load either a snapshot or a GeoNames TSV dump, by sniffing the header."""
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    if is_snapshot(path):
        return load_snapshot(path)
    return ingest_path(path, bbox_path)
