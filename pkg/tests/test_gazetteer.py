import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toporesolve.gazetteer import (Division, Gazetteer, GazetteerEntry, IngestError,
                                   IngestOptions, ancestor_at, haversine_km, hierarchy_of,
                                   in_bounding_box, ingest_geonames, lookup, normalize_name)

EDMONTON, ALBERTA, CANADA = 5946768, 5883102, 6251999


def _pick(lines, *ids):
    wanted = {str(i) for i in ids}
    return [ln for ln in lines if ln.split("\t", 1)[0] in wanted]


def _row(**kw):
    cols = ["1", "Somewhere", "Somewhere", "", "10.0", "20.0", "P", "PPL", "XX", "",
            "01", "", "", "", "0", "", "0", "", "2024-01-01"]
    for idx, val in kw.items():
        cols[int(idx[1:])] = val
    return "\t".join(cols) + "\n"


def test_three_line_fixture(fixture_lines):
    g = ingest_geonames(_pick(fixture_lines, EDMONTON, ALBERTA, CANADA))
    assert len(g) == 3
    assert g.admin_index[("CA", "01")] == ALBERTA
    assert g.admin_index[("CA",)] == CANADA
    assert g.report.malformed == 0


def test_empty_stream():
    g = ingest_geonames(io.StringIO(""))
    assert len(g) == 0 and g.report.malformed == 0


def test_latitude_out_of_range_is_skipped(fixture_lines):
    lines = fixture_lines[:20] + [_row(c0="99", c4="91.0")]
    g = ingest_geonames(lines)
    assert g.report.malformed == 1
    assert 99 not in g


def test_mostly_malformed_is_fatal():
    with pytest.raises(IngestError, match="malformed"):
        ingest_geonames(["garbage\n"] * 5 + [_row()])


def test_unreadable_stream():
    class Broken(io.StringIO):
        def __iter__(self):
            raise OSError("disk on fire")
    with pytest.raises(IngestError):
        ingest_geonames(Broken())


def test_antimeridian_boxes_rejected(fixture_lines):
    boxes = io.StringIO(f"{CANADA}\t41\t170\t83\t-170\n{ALBERTA}\t49\t-120\t60\t-110\n")
    g = ingest_geonames(_pick(fixture_lines, CANADA, ALBERTA),
                        IngestOptions(bounding_boxes=boxes))
    assert g[CANADA].bounding_box is None
    assert g[ALBERTA].bounding_box == (49.0, -120.0, 60.0, -110.0)
    assert g.report.rejected_boxes == 1


def test_lookup_uses_alternate_names(g):
    assert [e.id for e in lookup(g, "UK")] == [2635167]
    assert [e.id for e in lookup(g, "  québec ")] == [6115047]
    assert lookup(g, "Zqxw-nonexistent") == []


def test_lookup_ascending_ids(g):
    ids = [e.id for e in lookup(g, "Edmonton")]
    assert ids == sorted(ids) and len(ids) == 4


def test_normalize_name():
    assert normalize_name("  New   YORK ") == "new york"
    assert normalize_name("ＬＯＮＤＯＮ") == "london"


def test_hierarchy_edmonton(g):
    chain = hierarchy_of(g, g[EDMONTON])
    assert (chain.county, chain.state, chain.country) == (None, ALBERTA, CANADA)
    assert ancestor_at(chain, Division.STATE, g).name == "Alberta"
    assert ancestor_at(chain, Division.COUNTY, g) is None


def test_hierarchy_country_is_its_own_country(g):
    chain = hierarchy_of(g, g[CANADA])
    assert (chain.county, chain.state, chain.country) == (None, None, CANADA)
    assert ancestor_at(chain, Division.COUNTRY, g).id == CANADA
    assert chain.parent() is None


def test_hierarchy_unresolvable_admin1(g):
    kingston_jm = g[3489854]
    chain = hierarchy_of(g, kingston_jm)
    assert chain.state is None and chain.country == 3489940


def test_hierarchy_with_county(g):
    chain = hierarchy_of(g, g[4717560])  # Paris, Texas
    assert chain.county == 4705349 and chain.state == 4736286 and chain.country == 6252001
    assert chain.parent() == 4705349


def test_hierarchy_deterministic(g):
    for e in g.entries.values():
        assert hierarchy_of(g, e) == hierarchy_of(g, e)


def test_chain_upward_consistent(g):
    for e in g.entries.values():
        c = g.hierarchy_of(e)
        if c.county is not None:
            county = g[c.county]
            assert (county.country_code, county.admin1_code) == (e.country_code, e.admin1_code)


def test_ingest_then_lookup_every_line(g, fixture_lines):
    for line in fixture_lines:
        cols = line.split("\t")
        assert int(cols[0]) in [e.id for e in lookup(g, cols[1])]


def test_haversine_examples():
    assert haversine_km((0, 0), (0, 0)) == 0.0
    assert haversine_km((0, 0), (0, 180)) == pytest.approx(20015.1, abs=0.1)
    # chord-length route on the unit sphere, computed independently
    assert haversine_km((48.8566, 2.3522), (33.6609, -95.5555)) == pytest.approx(7783.353, abs=1.0)


def test_haversine_rejects_bad_coords():
    with pytest.raises(ValueError):
        haversine_km((91, 0), (0, 0))
    with pytest.raises(ValueError):
        haversine_km((0, 0), (0, 181))


def test_bounding_box_closed_intervals():
    box = (10.0, 20.0, 30.0, 40.0)
    assert in_bounding_box((20.0, 30.0), box)
    assert in_bounding_box((30.0, 25.0), box)
    assert not in_bounding_box((31.0, 25.0), box)


def test_duplicate_ids_rejected():
    e = GazetteerEntry(1, "A", "A", (), 0, 0, "P", "PPL", "XX", "", "", 0)
    with pytest.raises(ValueError):
        Gazetteer([e, e])


lat = st.floats(-90, 90, allow_nan=False)
lon = st.floats(-180, 180, allow_nan=False)
point = st.tuples(lat, lon)


@given(point, point, point)
@settings(max_examples=300)
def test_haversine_metric_properties(a, b, c):
    ab, ba = haversine_km(a, b), haversine_km(b, a)
    assert ab == pytest.approx(ba, abs=1e-9)
    assert haversine_km(a, a) == 0.0
    assert ab <= haversine_km(a, c) + haversine_km(c, b) + 1e-6
    assert 0 <= ab <= math.pi * 6371.0088 + 1e-6


name = st.sampled_from(["Alpha", "Beta", "Gamma", "Delta", "New Alpha", "BETA"])


@given(st.lists(st.tuples(name, st.lists(name, max_size=3)), min_size=1, max_size=12))
def test_lookup_sound_and_complete(rows):
    entries = [GazetteerEntry(i + 1, n, n, tuple(alts), 0, 0, "P", "PPL", "XX", "", "", 0)
               for i, (n, alts) in enumerate(rows)]
    g = Gazetteer(entries)
    for query in {normalize_name(n) for n, alts in rows for n in [n, *alts]}:
        found = {e.id for e in lookup(g, query)}
        expected = {e.id for e in entries if query in e.names()}
        assert found == expected
