"""GeoNames ingestion, name index, admin-code hierarchies and distances.

A :class:`Gazetteer` is built once from a GeoNames ``allCountries``-style
dump (19 tab-separated columns) and is read-only afterwards.  Hierarchies
are resolved by joining admin codes against the ADM1/ADM2/PCL* records of
the same dump, so a single file is enough.
"""

from __future__ import annotations

import enum
import io
import logging
import math
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO

log = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0088
N_COLUMNS = 19
MAX_MALFORMED_FRACTION = 0.10

_WS = re.compile(r"\s+")


class IngestError(Exception):
    """Raised when a dump cannot be read or is mostly malformed."""


def normalize_name(name: str) -> str:
    """NFKC, case-fold, trim and collapse internal whitespace."""
    return _WS.sub(" ", unicodedata.normalize("NFKC", name).casefold()).strip()


class Division(enum.IntEnum):
    """Administrative division, ordered finest to coarsest."""

    COUNTY = 0
    STATE = 1
    COUNTRY = 2


BoundingBox = tuple[float, float, float, float]  # min_lat, min_lon, max_lat, max_lon


@dataclass(frozen=True)
class GazetteerEntry:
    id: int
    name: str
    ascii_name: str
    alternate_names: tuple[str, ...]
    latitude: float
    longitude: float
    feature_class: str
    feature_code: str
    country_code: str
    admin1_code: str
    admin2_code: str
    population: int
    bounding_box: Optional[BoundingBox] = None

    @property
    def coords(self) -> tuple[float, float]:
        return (self.latitude, self.longitude)

    def names(self) -> set[str]:
        """Normalized primary, ascii and alternate names."""
        out = {normalize_name(self.name), normalize_name(self.ascii_name)}
        out.update(normalize_name(a) for a in self.alternate_names)
        out.discard("")
        return out

    @property
    def is_country(self) -> bool:
        return self.feature_code.startswith("PCL")


@dataclass(frozen=True)
class HierarchyChain:
    leaf: int
    county: Optional[int] = None
    state: Optional[int] = None
    country: Optional[int] = None

    def at(self, division: Division) -> Optional[int]:
        return (self.county, self.state, self.country)[division]

    def ancestor_ids(self) -> list[int]:
        """Distinct ancestors strictly above the leaf, finest first."""
        out = []
        for node in (self.county, self.state, self.country):
            if node is not None and node != self.leaf and node not in out:
                out.append(node)
        return out

    def parent(self) -> Optional[int]:
        ancestors = self.ancestor_ids()
        return ancestors[0] if ancestors else None

    def __contains__(self, node_id: int) -> bool:
        return node_id in (self.leaf, self.county, self.state, self.country)


@dataclass
class IngestReport:
    lines: int = 0
    entries: int = 0
    malformed: int = 0
    malformed_lines: list[int] = field(default_factory=list)
    rejected_boxes: int = 0


class Gazetteer:
    """Immutable collection of :class:`GazetteerEntry` with lookup indexes."""

    def __init__(self, entries: Iterable[GazetteerEntry] = ()):
        self.entries: dict[int, GazetteerEntry] = {}
        self.name_index: dict[str, set[int]] = {}
        self.admin_index: dict[tuple[str, ...], int] = {}
        self.report = IngestReport()
        for entry in entries:
            self._add(entry)
        self._chains: dict[int, HierarchyChain] = {}

    def _add(self, entry: GazetteerEntry) -> None:
        if entry.id in self.entries:
            raise ValueError(f"duplicate gazetteer id {entry.id}")
        self.entries[entry.id] = entry
        for name in entry.names():
            self.name_index.setdefault(name, set()).add(entry.id)
        key = _admin_key(entry)
        if key is not None:
            # keep the first record for a key, except that PCLI beats other PCL* codes
            prev = self.admin_index.get(key)
            if prev is None or (entry.feature_code == "PCLI"
                                and self.entries[prev].feature_code != "PCLI"):
                self.admin_index[key] = entry.id

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, entry_id: int) -> GazetteerEntry:
        return self.entries[entry_id]

    def __contains__(self, entry_id: object) -> bool:
        return entry_id in self.entries

    def get(self, entry_id: int) -> Optional[GazetteerEntry]:
        return self.entries.get(entry_id)

    def lookup(self, name: str) -> list[GazetteerEntry]:
        ids = self.name_index.get(normalize_name(name), ())
        return [self.entries[i] for i in sorted(ids)]

    def hierarchy_of(self, entry: GazetteerEntry) -> HierarchyChain:
        chain = self._chains.get(entry.id)
        if chain is None:
            chain = hierarchy_of(self, entry)
            self._chains[entry.id] = chain
        return chain


def _admin_key(entry: GazetteerEntry) -> Optional[tuple[str, ...]]:
    code = entry.feature_code
    if code.startswith("PCL") and entry.country_code:
        return (entry.country_code,)
    if code == "ADM1" and entry.admin1_code:
        return (entry.country_code, entry.admin1_code)
    if code == "ADM2" and entry.admin1_code and entry.admin2_code:
        return (entry.country_code, entry.admin1_code, entry.admin2_code)
    return None


def lookup(g: Gazetteer, name: str) -> list[GazetteerEntry]:
    """Entries whose normalized names contain ``name``, by ascending id."""
    return g.lookup(name)


def hierarchy_of(g: Gazetteer, entry: GazetteerEntry) -> HierarchyChain:
    """Resolve the county/state/country chain of ``entry`` via admin codes.

    Levels whose codes are empty or do not resolve are left as ``None``.
    """
    cc, a1, a2 = entry.country_code, entry.admin1_code, entry.admin2_code
    county = g.admin_index.get((cc, a1, a2)) if cc and a1 and a2 else None
    state = g.admin_index.get((cc, a1)) if cc and a1 else None
    country = g.admin_index.get((cc,)) if cc else None
    return HierarchyChain(leaf=entry.id, county=county, state=state, country=country)


def ancestor_at(chain: HierarchyChain, d: Division, g: Gazetteer) -> Optional[GazetteerEntry]:
    node = chain.at(d)
    return None if node is None else g.entries.get(node)


def _check_coords(lat: float, lon: float) -> None:
    if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
        raise ValueError(f"coordinates out of range: ({lat}, {lon})")


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in km on a sphere of mean Earth radius."""
    (lat1, lon1), (lat2, lon2) = a, b
    _check_coords(lat1, lon1)
    _check_coords(lat2, lon2)
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dphi = p2 - p1
    dlam = math.radians(lon2 - lon1)
    h = math.sin(dphi / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def in_bounding_box(point: tuple[float, float], box: BoundingBox) -> bool:
    lat, lon = point
    min_lat, min_lon, max_lat, max_lon = box
    return min_lat <= lat <= max_lat and min_lon <= lon <= max_lon


def _parse_line(line: str) -> GazetteerEntry:
    cols = line.rstrip("\r\n").split("\t")
    if len(cols) != N_COLUMNS:
        raise ValueError(f"expected {N_COLUMNS} columns, got {len(cols)}")
    entry_id = int(cols[0])
    if entry_id <= 0:
        raise ValueError("non-positive id")
    lat, lon = float(cols[4]), float(cols[5])
    _check_coords(lat, lon)
    pop = int(cols[14]) if cols[14] else 0
    if pop < 0:
        raise ValueError("negative population")
    alts = tuple(a for a in cols[3].split(",") if a.strip())
    return GazetteerEntry(
        id=entry_id, name=cols[1], ascii_name=cols[2], alternate_names=alts,
        latitude=lat, longitude=lon, feature_class=cols[6], feature_code=cols[7],
        country_code=cols[8], admin1_code=cols[10], admin2_code=cols[11],
        population=pop,
    )


def read_bounding_boxes(stream: TextIO) -> tuple[dict[int, BoundingBox], int]:
    """Parse the ``id, min_lat, min_lon, max_lat, max_lon`` sidecar.

    Returns the boxes and the number of rejected rows (malformed, inverted or
    crossing the antimeridian).
    """
    boxes: dict[int, BoundingBox] = {}
    rejected = 0
    for line in stream:
        if not line.strip():
            continue
        try:
            cols = line.rstrip("\r\n").split("\t")
            entry_id = int(cols[0])
            box = tuple(float(c) for c in cols[1:5])
            if len(box) != 4:
                raise ValueError
            min_lat, min_lon, max_lat, max_lon = box
            _check_coords(min_lat, min_lon)
            _check_coords(max_lat, max_lon)
            if min_lat > max_lat or min_lon > max_lon:
                raise ValueError
        except (ValueError, IndexError):
            rejected += 1
            continue
        boxes[entry_id] = box  # type: ignore[assignment]
    return boxes, rejected


@dataclass(frozen=True)
class IngestOptions:
    bounding_boxes: Optional[TextIO] = None
    max_malformed_fraction: float = MAX_MALFORMED_FRACTION


def ingest_geonames(dump: TextIO | Iterable[str],
                    options: Optional[IngestOptions] = None) -> Gazetteer:
    """Build a :class:`Gazetteer` from GeoNames TSV lines.

    Malformed lines (wrong column count, unparsable numbers, out-of-range
    coordinates, duplicate ids) are skipped and counted in ``g.report``.
    More than ``max_malformed_fraction`` malformed lines raises
    :class:`IngestError`, since that usually means the wrong file was given.
    """
    options = options or IngestOptions()
    report = IngestReport()
    parsed: list[GazetteerEntry] = []
    seen: set[int] = set()
    try:
        for lineno, line in enumerate(dump, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            report.lines += 1
            try:
                entry = _parse_line(line)
                if entry.id in seen:
                    raise ValueError("duplicate id")
            except ValueError as exc:
                report.malformed += 1
                if len(report.malformed_lines) < 20:
                    report.malformed_lines.append(lineno)
                log.debug("line %d skipped: %s", lineno, exc)
                continue
            seen.add(entry.id)
            parsed.append(entry)
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read gazetteer dump: {exc}") from exc

    if report.lines and report.malformed > options.max_malformed_fraction * report.lines:
        raise IngestError(
            f"{report.malformed} of {report.lines} lines malformed "
            f"(first at lines {report.malformed_lines}); is this a GeoNames dump?")

    if options.bounding_boxes is not None:
        boxes, report.rejected_boxes = read_bounding_boxes(options.bounding_boxes)
        parsed = [_with_box(e, boxes.get(e.id)) for e in parsed]

    g = Gazetteer(parsed)
    report.entries = len(g)
    g.report = report
    return g


def _with_box(entry: GazetteerEntry, box: Optional[BoundingBox]) -> GazetteerEntry:
    if box is None:
        return entry
    return GazetteerEntry(**{**entry.__dict__, "bounding_box": box})


def ingest_path(path, bbox_path=None) -> Gazetteer:
    """Convenience wrapper around :func:`ingest_geonames` for file paths."""
    with open(path, encoding="utf-8") as fh:
        if bbox_path is None:
            return ingest_geonames(fh)
        with open(bbox_path, encoding="utf-8") as bh:
            return ingest_geonames(fh, IngestOptions(bounding_boxes=bh))


def ingest_text(text: str, bbox_text: Optional[str] = None) -> Gazetteer:
    opts = IngestOptions(bounding_boxes=io.StringIO(bbox_text)) if bbox_text else None
    return ingest_geonames(io.StringIO(text), opts)
