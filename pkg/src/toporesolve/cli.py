"""``toporesolve`` command line: index, resolve, eval, serve.

Exit codes: 0 ok, 1 resolution/evaluation failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .api import RESOLVERS, corpus_payload, dumps, predictions_from_payload, resolve_document
from .cbh import CbhConfig
from .chf import DEFAULT_TAU
from .corpus import CorpusError, load_corpus
from .evaluation import (Correctness, EvalConfig, EvaluationError, Mode, RELAXED_KM,
                         evaluate, parse_sweep, sweep_csv, tau_sweep)
from .gazetteer import IngestError, ingest_path
from .snapshot import SnapshotError, load_gazetteer, save_snapshot

ENV_SNAPSHOT = "TOPORESOLVE_SNAPSHOT"

log = logging.getLogger("toporesolve")


class UsageError(Exception):
    pass


def _gazetteer_arg(p: argparse.ArgumentParser, required_default: bool = True) -> None:
    p.add_argument("--gazetteer", default=os.environ.get(ENV_SNAPSHOT),
                   help=f"snapshot or GeoNames TSV (default: ${ENV_SNAPSHOT})")
    p.add_argument("--bbox", help="bounding-box sidecar TSV (only with a TSV gazetteer)")


def _resolver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--resolver", choices=RESOLVERS, default="chf")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--max-iterations", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toporesolve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="ingest a GeoNames dump into a snapshot")
    _gazetteer_arg(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("resolve", help="resolve the toponyms of a corpus")
    _gazetteer_arg(p)
    p.add_argument("--corpus", required=True)
    _resolver_args(p)
    p.add_argument("--out", help="write resolutions JSON here instead of stdout")

    p = sub.add_parser("eval", help="score resolutions against gold annotations")
    _gazetteer_arg(p)
    p.add_argument("--corpus", required=True, help="gold corpus JSON")
    p.add_argument("--predictions", help="resolutions JSON from `resolve` "
                   "(default: run --resolver now)")
    p.add_argument("--recognized", help="corpus JSON of recognizer spans (geotag mode)")
    _resolver_args(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="resol")
    p.add_argument("--correctness", choices=[c.value for c in Correctness], default="distance")
    p.add_argument("--threshold-km", type=float, default=RELAXED_KM)
    p.add_argument("--sweep-tau", metavar="A:B:STEP", help="emit a tau sweep as CSV")
    p.add_argument("--out", help="write metrics JSON (or sweep CSV) here")

    p = sub.add_parser("serve", help="serve POST /resolve and GET /healthz")
    _gazetteer_arg(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--max-body-bytes", type=int, default=1 << 20)
    return parser


def _load_gazetteer(args):
    if not args.gazetteer:
        raise UsageError(f"no gazetteer given (use --gazetteer or set {ENV_SNAPSHOT})")
    try:
        return load_gazetteer(args.gazetteer, args.bbox)
    except FileNotFoundError as exc:
        raise UsageError(f"cannot open {exc.filename or exc.args[0]}") from None


def _load_corpus(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return load_corpus(fh)
    except FileNotFoundError:
        raise UsageError(f"cannot open {path}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_index(args) -> int:
    if not args.gazetteer or not os.path.exists(args.gazetteer):
        raise UsageError(f"cannot open {args.gazetteer}")
    if args.bbox and not os.path.exists(args.bbox):
        raise UsageError(f"cannot open {args.bbox}")
    g = ingest_path(args.gazetteer, args.bbox)
    save_snapshot(g, args.out)
    print(f"entries: {len(g)}")
    print(f"malformed lines: {g.report.malformed}")
    if args.bbox:
        print(f"rejected boxes: {g.report.rejected_boxes}")
    return 0


def cmd_resolve(args) -> int:
    g = _load_gazetteer(args)
    docs = _load_corpus(args.corpus)
    results = [resolve_document(d, g, args.resolver, args.tau, args.max_iterations)
               for d in docs]
    _emit(dumps(corpus_payload(docs, results)) + "\n", args.out)
    return 0


def cmd_eval(args) -> int:
    g = _load_gazetteer(args)
    docs = _load_corpus(args.corpus)
    cfg = EvalConfig(Mode(args.mode), Correctness(args.correctness), args.threshold_km)

    if args.sweep_tau:
        taus = parse_sweep(args.sweep_tau)
        rows = tau_sweep(docs, g, CbhConfig(max_iterations=args.max_iterations), taus, cfg)
        _emit(sweep_csv(rows), args.out)
        return 0

    recognized = _load_corpus(args.recognized) if args.recognized else None
    targets = recognized if recognized is not None else docs
    if args.predictions:
        try:
            with open(args.predictions, encoding="utf-8") as fh:
                payload = json.load(fh)
        except FileNotFoundError:
            raise UsageError(f"cannot open {args.predictions}") from None
        try:
            preds = predictions_from_payload(payload, targets, g)
        except ValueError as exc:
            raise EvaluationError(str(exc)) from None
    else:
        preds = [resolve_document(d, g, args.resolver, args.tau, args.max_iterations)
                 for d in targets]
    metrics = evaluate(docs, preds, g, cfg, recognized)
    print(metrics.to_table())
    print(metrics.to_json())
    if args.out:
        _emit(metrics.to_json() + "\n", args.out)
    return 0


def cmd_serve(args) -> int:
    from .server import make_server

    g = _load_gazetteer(args)
    server = make_server(g, args.host, args.port, args.max_body_bytes)
    log.warning("serving %d entries on http://%s:%d", len(g), args.host, server.server_port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


COMMANDS = {"index": cmd_index, "resolve": cmd_resolve, "eval": cmd_eval, "serve": cmd_serve}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SnapshotError, CorpusError, OSError) as exc:
        print(f"toporesolve: error: {exc}", file=sys.stderr)
        return 2
    except (IngestError, EvaluationError, ValueError) as exc:
        print(f"toporesolve: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
