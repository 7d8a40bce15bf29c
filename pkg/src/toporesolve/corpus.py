"""Documents, toponym mentions, tokenization and term positions.

Corpus files are JSON::

    {"documents": [{"doc_id": "...", "text": "...",
                    "toponyms": [{"start": 0, "end": 6, "surface": "London",
                                  "gold": {"geonames_id": 2643743}}]}]}

``start``/``end`` are byte offsets into the UTF-8 encoded text.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, TextIO

from .gazetteer import normalize_name


class CorpusError(ValueError):
    """Schema violation in a corpus file; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class Token:
    surface: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class GoldAnnotation:
    gazetteer_id: Optional[int] = None
    latitude: Optional[float] = None
    longitude: Optional[float] = None

    @property
    def coords(self) -> Optional[tuple[float, float]]:
        if self.latitude is None or self.longitude is None:
            return None
        return (self.latitude, self.longitude)


@dataclass(frozen=True)
class ToponymMention:
    surface: str
    char_start: int  # str index into Document.text
    char_end: int
    token_index: int
    gold: Optional[GoldAnnotation] = None
    re_aligned: bool = False
    start: int = -1  # UTF-8 byte offsets as found in the corpus file
    end: int = -1

    @property
    def key(self) -> str:
        return normalize_name(self.surface)


@dataclass(frozen=True)
class MentionGroup:
    """All mentions of one normalized surface inside a document."""

    key: str
    surface: str
    members: tuple[int, ...]
    positions: tuple[int, ...]


@dataclass
class Document:
    doc_id: str
    text: str
    tokens: list[Token]
    toponyms: list[ToponymMention]
    _groups: Optional[list[MentionGroup]] = field(default=None, repr=False, compare=False)
    _norm_tokens: Optional[list[str]] = field(default=None, repr=False, compare=False)

    def groups(self) -> list[MentionGroup]:
        """Mention groups in order of first appearance."""
        if self._groups is None:
            order: dict[str, list[int]] = {}
            for i, m in enumerate(self.toponyms):
                order.setdefault(m.key, []).append(i)
            self._groups = [
                MentionGroup(
                    key=key,
                    surface=self.toponyms[members[0]].surface,
                    members=tuple(members),
                    positions=tuple(sorted({self.toponyms[i].token_index for i in members})),
                )
                for key, members in order.items()
            ]
        return self._groups

    def normalized_tokens(self) -> list[str]:
        if self._norm_tokens is None:
            self._norm_tokens = [normalize_name(t.surface) for t in self.tokens]
        return self._norm_tokens


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def tokenize(text: str) -> list[Token]:
    """Whitespace tokenization with leading/trailing punctuation stripped."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        j = i
        while j < n and not text[j].isspace():
            j += 1
        s, e = i, j
        while s < e and _is_punct(text[s]):
            s += 1
        while e > s and _is_punct(text[e - 1]):
            e -= 1
        if s < e:
            tokens.append(Token(text[s:e], s, e))
        i = j
    return tokens


_POSSESSIVE = ("'s", "’s")


def _strip_possessive(norm: str) -> str:
    for suffix in _POSSESSIVE:
        if norm.endswith(suffix) and len(norm) > len(suffix):
            return norm[: -len(suffix)]
    return norm


def mentions_of(doc: Document, names: Iterable[str]) -> list[int]:
    """Token indices where a run of tokens spells one of ``names``.

    ``names`` must already be normalized.  Runs are matched greedily from
    the left, longest first, and never overlap; the index reported is the
    first token of the run.  A trailing possessive ``'s`` on the last token
    is ignored.
    """
    names = set(names)
    if not names:
        return []
    max_len = max(len(n.split(" ")) for n in names)
    toks = doc.normalized_tokens()
    out = []
    i = 0
    while i < len(toks):
        matched = 0
        for length in range(min(max_len, len(toks) - i), 0, -1):
            head = toks[i:i + length - 1]
            last = toks[i + length - 1]
            if (" ".join(head + [last]) in names
                    or " ".join(head + [_strip_possessive(last)]) in names):
                matched = length
                break
        if matched:
            out.append(i)
            i += matched
        else:
            i += 1
    return out


def term_distance(i: int, j: int) -> int:
    return abs(i - j)


def _byte_to_char(text: str) -> dict[int, int]:
    table = {}
    pos = 0
    for idx, ch in enumerate(text):
        table[pos] = idx
        pos += len(ch.encode("utf-8"))
    table[pos] = len(text)
    return table


def char_to_byte(text: str, idx: int) -> int:
    return len(text[:idx].encode("utf-8"))


def _covering_token(tokens: list[Token], start: int, end: int) -> Optional[int]:
    for k, tok in enumerate(tokens):
        if tok.char_end > start and tok.char_start < end:
            return k
    return None


def _expect(obj: Any, typ, path: str, optional: bool = False):
    if obj is None and optional:
        return None
    if typ is float:
        ok = isinstance(obj, (int, float)) and not isinstance(obj, bool)
    elif typ is int:
        ok = isinstance(obj, int) and not isinstance(obj, bool)
    else:
        ok = isinstance(obj, typ)
    if not ok:
        raise CorpusError(path, f"expected {typ.__name__}, got {type(obj).__name__}")
    return obj


def _parse_gold(raw: Any, path: str) -> Optional[GoldAnnotation]:
    if raw is None:
        return None
    _expect(raw, dict, path)
    gid = _expect(raw.get("geonames_id"), int, path + ".geonames_id", optional=True)
    lat = _expect(raw.get("lat"), float, path + ".lat", optional=True)
    lon = _expect(raw.get("lon"), float, path + ".lon", optional=True)
    if gid is not None and gid <= 0:
        raise CorpusError(path + ".geonames_id", "must be positive")
    if (lat is None) != (lon is None):
        raise CorpusError(path, "lat and lon must be given together")
    if lat is not None and not (-90 <= lat <= 90 and -180 <= lon <= 180):
        raise CorpusError(path, "coordinates out of range")
    if gid is None and lat is None:
        raise CorpusError(path, "needs geonames_id or lat/lon")
    return GoldAnnotation(gid, None if lat is None else float(lat),
                          None if lon is None else float(lon))


def build_document(doc_id: str, text: str, spans: list[dict], path: str = "$") -> Document:
    """Tokenize ``text`` and attach mentions given as byte-offset dicts."""
    tokens = tokenize(text)
    b2c = _byte_to_char(text)
    nbytes = len(text.encode("utf-8"))
    mentions = []
    for k, raw in enumerate(spans):
        p = f"{path}.toponyms[{k}]"
        _expect(raw, dict, p)
        start = _expect(raw.get("start"), int, p + ".start")
        end = _expect(raw.get("end"), int, p + ".end")
        if not 0 <= start < end <= nbytes:
            raise CorpusError(p, f"span [{start}, {end}) outside text of {nbytes} bytes")
        if start not in b2c or end not in b2c:
            raise CorpusError(p, "offset splits a UTF-8 character")
        cs, ce = b2c[start], b2c[end]
        surface = text[cs:ce]
        given = _expect(raw.get("surface"), str, p + ".surface", optional=True)
        if given is not None and given != surface:
            raise CorpusError(p + ".surface", f"{given!r} does not match text {surface!r}")
        tok = _covering_token(tokens, cs, ce)
        if tok is None:
            raise CorpusError(p, "span covers no token")
        aligned = tokens[tok].char_start == cs and any(
            t.char_end == ce for t in tokens[tok:])
        mentions.append(ToponymMention(
            surface=surface, char_start=cs, char_end=ce, token_index=tok,
            gold=_parse_gold(raw.get("gold"), p + ".gold"),
            re_aligned=not aligned, start=start, end=end,
        ))
    return Document(doc_id=doc_id, text=text, tokens=tokens, toponyms=mentions)


def parse_corpus(data: Any) -> list[Document]:
    _expect(data, dict, "$")
    docs_raw = _expect(data.get("documents"), list, "$.documents")
    docs = []
    for i, raw in enumerate(docs_raw):
        p = f"$.documents[{i}]"
        _expect(raw, dict, p)
        doc_id = _expect(raw.get("doc_id"), str, p + ".doc_id")
        text = _expect(raw.get("text"), str, p + ".text")
        spans = _expect(raw.get("toponyms", []), list, p + ".toponyms")
        docs.append(build_document(doc_id, text, spans, p))
    return docs


def load_corpus(stream: TextIO) -> list[Document]:
    try:
        data = json.load(stream)
    except json.JSONDecodeError as exc:
        raise CorpusError("$", f"invalid JSON: {exc}") from exc
    return parse_corpus(data)


def corpus_to_json(docs: list[Document]) -> dict:
    out = []
    for doc in docs:
        tops = []
        for m in doc.toponyms:
            item: dict[str, Any] = {"start": m.start, "end": m.end, "surface": m.surface}
            if m.gold is not None:
                gold: dict[str, Any] = {}
                if m.gold.gazetteer_id is not None:
                    gold["geonames_id"] = m.gold.gazetteer_id
                if m.gold.coords is not None:
                    gold["lat"], gold["lon"] = m.gold.coords
                item["gold"] = gold
            tops.append(item)
        out.append({"doc_id": doc.doc_id, "text": doc.text, "toponyms": tops})
    return {"documents": out}


def dump_corpus(docs: list[Document], stream: TextIO) -> None:
    json.dump(corpus_to_json(docs), stream, ensure_ascii=False, indent=1)


def make_document(doc_id: str, text: str, surfaces: Iterable[str] = (),
                  gold: Optional[dict[str, GoldAnnotation]] = None) -> Document:
    """Build a document annotating every whole-token occurrence of ``surfaces``.

    Handy for tests and demos; real corpora come through :func:`load_corpus`.
    """
    gold = gold or {}
    tokens = tokenize(text)
    norm = [normalize_name(t.surface) for t in tokens]
    spans = []
    seen: set[str] = set()
    for surface in surfaces:
        if normalize_name(surface) in seen:
            continue
        seen.add(normalize_name(surface))
        parts = normalize_name(surface).split(" ")
        k = len(parts)
        for i in range(len(tokens) - k + 1):
            window = norm[i:i + k]
            possessive = window[-1] != parts[-1]
            if possessive:
                window[-1] = _strip_possessive(window[-1])
            if window == parts:
                cs = tokens[i].char_start
                ce = tokens[i + k - 1].char_end
                if possessive:
                    ce -= 2
                span = {"start": char_to_byte(text, cs), "end": char_to_byte(text, ce)}
                g = gold.get(surface)
                if g is not None:
                    span["gold"] = {k2: v for k2, v in (("geonames_id", g.gazetteer_id),
                                                        ("lat", g.latitude),
                                                        ("lon", g.longitude)) if v is not None}
                spans.append(span)
    spans.sort(key=lambda s: s["start"])
    return build_document(doc_id, text, spans)
