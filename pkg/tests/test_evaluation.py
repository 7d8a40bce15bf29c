import dataclasses
import math
import random

import pytest

from toporesolve.api import resolve_document
from toporesolve.cbh import CbhConfig, Interpretation, ResolvedToponym, Source, candidates
from toporesolve.corpus import GoldAnnotation, make_document
from toporesolve.evaluation import (RELAXED_KM, TEN_MILES_KM, Correctness, EvalConfig,
                                    EvaluationError, Metrics, Mode, UnresolvableGold, evaluate,
                                    is_correct, parse_sweep, sweep_csv, tau_sweep)

CANADA = 6251999
R = 6371.0088


def _at(g, entry_id, lat, lon):
    """An interpretation reusing ``entry_id``'s record but placed at (lat, lon)."""
    e = g.get(entry_id)
    moved = dataclasses.replace(e, latitude=lat, longitude=lon)
    return Interpretation(moved, g.hierarchy_of(e))


def _parallel_km(lat, dlon):
    # great-circle distance between two points on one parallel
    return 2 * R * math.asin(math.cos(math.radians(lat)) * math.sin(math.radians(dlon) / 2))


def test_metric_arithmetic():
    m = Metrics.from_counts(gold=12, predicted=10, correct=8)
    assert (m.precision, m.recall, m.f1) == pytest.approx((0.8, 0.6667, 0.7273), abs=1e-4)
    z = Metrics.from_counts(gold=5, predicted=0, correct=0)
    assert (z.precision, z.recall, z.f1) == (0.0, 0.0, 0.0)


def test_pred_equal_gold_is_correct(g):
    interp = candidates("London", g)[0]
    gold = GoldAnnotation(interp.id)
    for c in Correctness:
        assert is_correct(interp, gold, g, EvalConfig(correctness=c))


def test_bbox_versus_distance(g):
    lat, lon = 60.10867, -104.6
    expected = _parallel_km(lat, lon - (-113.64258))
    assert expected == pytest.approx(500.7, abs=0.1)
    pred = _at(g, CANADA, lat, lon)
    gold = GoldAnnotation(CANADA)
    assert is_correct(pred, gold, g, EvalConfig(correctness=Correctness.BBOX))
    assert not is_correct(pred, gold, g, EvalConfig(correctness=Correctness.DISTANCE))


def test_bbox_falls_back_to_distance_without_box(g):
    gold = GoldAnnotation(None, 10.0, 10.0)
    near = _at(g, CANADA, 10.0, 10.5)
    assert is_correct(near, gold, g, EvalConfig(correctness=Correctness.BBOX))
    far = _at(g, CANADA, 10.0, 12.0)
    assert not is_correct(far, gold, g, EvalConfig(correctness=Correctness.BBOX))


def test_threshold_presets(g):
    pred = _at(g, 2643743, 51.5, -0.84)
    gold = GoldAnnotation(None, 51.5, -0.12)
    assert _parallel_km(51.5, 0.72) == pytest.approx(49.84, abs=0.01)
    assert is_correct(pred, gold, g, EvalConfig(threshold_km=RELAXED_KM))
    assert not is_correct(pred, gold, g, EvalConfig(threshold_km=TEN_MILES_KM))
    far = _at(g, 2643743, 51.5, -0.12 + 2.9)
    assert not is_correct(far, gold, g, EvalConfig())


def test_unresolvable_gold(g):
    with pytest.raises(UnresolvableGold):
        is_correct(candidates("London", g)[0], GoldAnnotation(999999999), g, EvalConfig())
    doc = make_document("d", "London and Paris", ["London", "Paris"],
                        {"London": GoldAnnotation(2643743), "Paris": GoldAnnotation(999999999)})
    m = evaluate([doc], [resolve_document(doc, g, "preliminary")], g)
    assert (m.gold, m.excluded, m.correct) == (1, 1, 1)


def _perfect(doc, g):
    out = []
    for grp in doc.groups():
        gold = doc.toponyms[grp.members[0]].gold
        entry = g.get(gold.gazetteer_id)
        out.append(ResolvedToponym(grp, Interpretation(entry, g.hierarchy_of(entry)), 1.0,
                                   Source.CBH))
    return out


def test_perfect_predictions(g):
    doc = make_document("d", "Toronto and Edmonton", ["Toronto", "Edmonton"],
                        {"Toronto": GoldAnnotation(6167865), "Edmonton": GoldAnnotation(4290529)})
    m = evaluate([doc], [_perfect(doc, g)], g)
    assert (m.precision, m.recall, m.f1, m.mean_error_km) == (1.0, 1.0, 1.0, 0.0)


def test_misaligned_predictions_name_document(corpus, g):
    preds = [resolve_document(d, g, "cbh") for d in corpus]
    preds[2] = preds[2][:-1]
    with pytest.raises(EvaluationError, match=corpus[2].doc_id):
        evaluate(corpus, preds, g)
    with pytest.raises(EvaluationError):
        evaluate(corpus, preds[:-1], g)


def test_bounds_and_permutation_invariance(corpus, g):
    preds = [resolve_document(d, g, "chf") for d in corpus]
    m = evaluate(corpus, preds, g)
    assert 0 <= m.precision <= 1 and 0 <= m.recall <= 1
    assert m.correct <= min(m.predicted, m.gold)
    order = list(range(len(corpus)))
    random.Random(7).shuffle(order)
    m2 = evaluate([corpus[i] for i in order], [preds[i] for i in order], g)
    assert m2 == m


def test_all_correct_mean_error_within_threshold(corpus, g):
    cfg = EvalConfig(threshold_km=TEN_MILES_KM)
    docs = [d for d in corpus
            if all(m.gold is not None and m.gold.gazetteer_id is not None for m in d.toponyms)]
    m = evaluate(docs, [_perfect(d, g) for d in docs], g, cfg)
    assert m.correct == m.predicted and m.mean_error_km <= TEN_MILES_KM


def test_geotag_mode(g):
    text = "Toronto and Kingston signed ; Ottawa watched"
    gold = make_document("d", text, ["Toronto", "Kingston"],
                         {"Toronto": GoldAnnotation(6167865), "Kingston": GoldAnnotation(5992500)})
    # recognizer found Toronto and a spurious "Ottawa", missed Kingston
    rec = make_document("d", text, ["Toronto", "Ottawa"])
    preds = [resolve_document(rec, g, "preliminary")]
    m = evaluate([gold], preds, g, EvalConfig(mode=Mode.GEOTAG), recognized=[rec])
    assert m.gold == 2 and m.correct == 1
    assert m.predicted == sum(r.interpretation is not None for r in preds[0])
    assert m.mean_error_km is None


def test_tau_sweep(corpus, g):
    with pytest.raises(ValueError):
        tau_sweep(corpus, g, CbhConfig(), [0.6, 0.5])
    rows = tau_sweep(corpus, g, CbhConfig(), [0.0, 0.55, 1.0])
    assert [t for t, _ in rows] == [0.0, 0.55, 1.0]
    shs = evaluate(corpus, [resolve_document(d, g, "shs") for d in corpus], g)
    assert rows[-1][1] == shs
    chf = evaluate(corpus, [resolve_document(d, g, "chf", 0.55) for d in corpus], g)
    assert rows[1][1] == chf
    assert sweep_csv(rows).splitlines()[0] == "tau,precision,recall,f1"


def test_parse_sweep():
    assert parse_sweep("0.5:0.6:0.05") == [0.5, 0.55, 0.6]
    assert parse_sweep("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    for bad in ("0.5", "0.6:0.5:0.1", "0:1:0", "a:b:c"):
        with pytest.raises(ValueError):
            parse_sweep(bad)


def test_fixture_scores(corpus, g):
    """Regression figures for the bundled fixture corpus."""
    got = {r: evaluate(corpus, [resolve_document(d, g, r) for d in corpus], g)
           for r in ("preliminary", "cbh", "shs", "chf")}
    assert got["chf"].precision == pytest.approx(0.95)
    assert got["cbh"].precision == pytest.approx(0.925)
    assert got["shs"].precision == pytest.approx(0.825)
    assert got["preliminary"].precision == pytest.approx(0.9)
