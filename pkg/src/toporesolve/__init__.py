"""Unsupervised toponym resolution over a GeoNames gazetteer."""

from importlib import resources

from .cbh import (CbhConfig, Interpretation, ResolvedToponym, Source, entropy_weight,
                  p_cb, p_inh, p_near, preliminary_resolve, resolve_cbh)
from .chf import ChfConfig, resolve_chf
from .corpus import Document, GoldAnnotation, ToponymMention, load_corpus, make_document, tokenize
from .evaluation import Correctness, EvalConfig, Metrics, Mode, evaluate, tau_sweep
from .gazetteer import (Division, Gazetteer, GazetteerEntry, HierarchyChain, ancestor_at,
                        haversine_km, hierarchy_of, in_bounding_box, ingest_geonames, lookup)
from .shs import brute_force_cover, generate_sets, greedy_cover, resolve_shs

__version__ = "0.1.0"


def load_fixture_gazetteer() -> Gazetteer:
    """The small bundled gazetteer used by the tests and demos."""
    from .gazetteer import IngestOptions

    data = resources.files(__package__) / "data"
    with (data / "fixture_geonames.tsv").open(encoding="utf-8") as fh, \
            (data / "fixture_bbox.tsv").open(encoding="utf-8") as bh:
        return ingest_geonames(fh, IngestOptions(bounding_boxes=bh))


def fixture_path(name: str):
    return resources.files(__package__) / "data" / name
