"""Command line interface.

Subcommands: generate, centrality, train, predict, evaluate, bench.
Exit codes: 0 success, 1 usage problem, 2 bad input data, 3 quality
floor not met. A key=value config file (--config or the NCAGE_CONFIG
environment variable) supplies defaults; explicit flags win.
"""

import argparse
import hashlib
import json
import logging
import os
import platform
import sys

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .centrality import CENTRALITY_KINDS, compute, normalize_ranks
from .checkpoint import load as load_checkpoint
from .checkpoint import save as save_checkpoint
from .errors import (CheckpointError, ConvergenceError, DisconnectedGraphError,
                     EdgeListError, InvalidParameterError, KindMismatchError,
                     NcageError)
from .evaluation import EvalReport, build_test_sets, edge_ladder, evaluate
from .graph import (GeneratorSpec, TOPOLOGIES, generate, is_connected,
                    largest_component, load_edge_list, save_edge_list)
from .models import MODEL_KINDS, model_from_checkpoint
from .training import TrainConfig, train

log = logging.getLogger("ncage")

_USAGE_EXIT = 1
_DATA_EXIT = 2
_FLOOR_EXIT = 3


class _UsageError(Exception):
    pass


class _FloorError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of killing the process with code 2."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _build_parser():
    parser = _Parser(prog="ncage",
                     description="Learn and evaluate node centrality rankings.")
    parser.add_argument("--version", action="version", version=f"ncage {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("generate",
                       help="write synthetic graphs as edge lists")
    p.add_argument("--topology", choices=TOPOLOGIES, required=True)
    p.add_argument("--n", type=int, help="node count (single graph)")
    p.add_argument("--m", type=int, default=2, help="sf: edges per new node")
    p.add_argument("--k", type=int, default=4, help="sw: ring degree")
    p.add_argument("--p", type=float, default=None,
                   help="sw rewire / rnd edge probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--largest-component", action="store_true",
                   help="reduce output to its largest connected component")
    p.add_argument("--out", help="edge list path (single graph)")
    p.add_argument("--out-dir", help="corpus directory (with --count)")
    p.add_argument("--count", type=int, help="number of graphs for a corpus")
    p.add_argument("--min-nodes", type=int, default=100)
    p.add_argument("--max-nodes", type=int, default=1000)
    p.add_argument("--config", default=None)

    p = sub.add_parser("centrality",
                       help="exact centrality of an edge-list graph")
    p.add_argument("--kind", choices=CENTRALITY_KINDS, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--ranks", action="store_true",
                   help="write normalized ranks instead of raw values")
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--config", default=None)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--model", choices=MODEL_KINDS, required=True)
    p.add_argument("--centrality", choices=CENTRALITY_KINDS, required=True)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--data-seed", type=int, default=7)
    p.add_argument("--num-graphs", type=int, default=1000)
    p.add_argument("--min-nodes", type=int, default=100)
    p.add_argument("--max-nodes", type=int, default=1000)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--eta-decay", type=float, default=None)
    p.add_argument("--eta-min", type=float, default=None)
    p.add_argument("--weight-decay", type=float, default=None)
    p.add_argument("--layers", type=int, default=None)
    p.add_argument("--embed-dim", type=int, default=None)
    p.add_argument("--graphs", dest="graphs_dir", default=None,
                   help="train on edge lists from this directory")
    p.add_argument("--workers", type=int, default=0,
                   help="threads for corpus preparation")
    p.add_argument("--resume", default=None, help="checkpoint to continue from")
    p.add_argument("--checkpoint-interval", type=int, default=None)
    p.add_argument("--checkpoint-dir", default=None)
    p.add_argument("--log-every", type=int, default=0,
                   help="log every Nth batch (0 = silent)")
    p.add_argument("--out", required=True, help="final checkpoint path")
    p.add_argument("--config", default=None)

    p = sub.add_parser("predict",
                       help="score the nodes of a graph with a trained model")
    p.add_argument("--model-file", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--config", default=None)

    p = sub.add_parser("evaluate",
                       help="tau-b of a model on held-out synthetic sets")
    p.add_argument("--model-file", required=True)
    p.add_argument("--centrality", choices=CENTRALITY_KINDS, default=None,
                   help="defaults to the centrality the model was trained on")
    p.add_argument("--allow-kind-mismatch", action="store_true")
    p.add_argument("--sets", default="sw,sf,rnd,mix",
                   help="comma list from sw,sf,rnd,mix")
    p.add_argument("--count", type=int, default=100, help="graphs per set")
    p.add_argument("--min-nodes", type=int, default=100)
    p.add_argument("--max-nodes", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--tau-floor", type=float, default=None,
                   help="exit 3 if the overall mean tau-b falls below this")
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--config", default=None)

    p = sub.add_parser("bench",
                       help="inference timing on an edge-count ladder")
    p.add_argument("--model-file", required=True)
    p.add_argument("--edges", default="10000,20000,40000,80000",
                   help="comma list of edge targets")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--config", default=None)
    return parser, sub


def _apply_config_file(args, parser, subparser_name):
    """Overlay key=value file entries onto args not explicitly set.

    Keys must name options of the active subcommand (dashes or
    underscores both accepted); anything else is a usage error.
    """
    path = args.config or os.environ.get("NCAGE_CONFIG")
    if not path:
        return args
    actions = {}
    for action in parser._actions:
        if action.dest not in ("help", "command", "config"):
            actions[action.dest] = action
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}")
    explicit = _explicit_dests(sys.argv[1:] if args.argv is None else args.argv)
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise _UsageError(f"{path}:{lineno}: expected key=value")
        key, _, value = text.partition("=")
        dest = key.strip().replace("-", "_")
        if dest not in actions:
            raise _UsageError(
                f"{path}:{lineno}: unknown key {key.strip()!r} for "
                f"'{subparser_name}'")
        if dest in explicit:
            continue
        action = actions[dest]
        value = value.strip()
        if isinstance(action, argparse._StoreTrueAction):
            parsed = value.lower() in ("1", "true", "yes")
        else:
            try:
                parsed = (action.type or str)(value)
            except ValueError:
                raise _UsageError(f"{path}:{lineno}: bad value for {key.strip()!r}")
            if action.choices and parsed not in action.choices:
                raise _UsageError(f"{path}:{lineno}: {parsed!r} not one of "
                                  f"{sorted(action.choices)}")
        setattr(args, dest, parsed)
    return args


def _explicit_dests(argv):
    """Option dests mentioned on the command line (so files never override)."""
    out = set()
    for token in argv:
        if token.startswith("--"):
            out.add(token[2:].split("=")[0].replace("-", "_"))
    return out


def _log_run_header(args):
    seeds = {k: getattr(args, k) for k in ("seed", "data_seed") if hasattr(args, k)}
    log.info("ncage %s | backend=%s numpy=%s python=%s | %s | seeds=%s",
             __version__, BACKEND, np.__version__, platform.python_version(),
             args.command, seeds or "n/a")


def _load_graph(path, take_largest):
    g = load_edge_list(path)
    if take_largest and not is_connected(g):
        g = largest_component(g)
    return g


def _node_label(g, i):
    return int(g.node_labels[i]) if g.node_labels is not None else i


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _cmd_generate(args):
    if (args.out is None) == (args.out_dir is None):
        raise _UsageError("generate needs exactly one of --out or --out-dir")
    p = args.p if args.p is not None else float("nan")
    if args.out is not None:
        if args.n is None:
            raise _UsageError("--n is required for a single graph")
        g = generate(GeneratorSpec(topology=args.topology, n=args.n, m=args.m,
                                   k=args.k, p=p, seed=args.seed))
        if args.largest_component and not is_connected(g):
            g = largest_component(g)
        save_edge_list(g, args.out)
        log.info("wrote %s: n=%d m=%d", args.out, g.n, g.m)
        return 0
    if args.count is None or args.count < 1:
        raise _UsageError("--count is required with --out-dir")
    os.makedirs(args.out_dir, exist_ok=True)
    manifest_path = os.path.join(args.out_dir, "manifest.json")
    entries = []
    for i in range(args.count):
        rng = np.random.default_rng(np.random.SeedSequence((args.seed, i)))
        n = int(rng.integers(args.min_nodes, args.max_nodes + 1))
        gseed = int(rng.integers(0, 2 ** 62))
        g = generate(GeneratorSpec(topology=args.topology, n=n, m=args.m,
                                   k=args.k, p=p, seed=gseed))
        if args.largest_component and not is_connected(g):
            g = largest_component(g)
        name = f"{args.topology}_{i:04d}.txt"
        save_edge_list(g, os.path.join(args.out_dir, name))
        entries.append({"name": name, "n": g.n, "m": g.m,
                        "sha256": _sha256(os.path.join(args.out_dir, name))})
    manifest = {"topology": args.topology, "count": args.count,
                "seed": args.seed, "min_nodes": args.min_nodes,
                "max_nodes": args.max_nodes, "files": entries}
    if os.path.exists(manifest_path):
        with open(manifest_path, "r", encoding="utf-8") as fh:
            old = json.load(fh)
        if old != manifest:
            raise EdgeListError(f"{manifest_path} disagrees with regenerated corpus")
        log.info("corpus verified against existing manifest (%d graphs)", args.count)
        return 0
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %d graphs + manifest to %s", args.count, args.out_dir)
    return 0


def _cmd_centrality(args):
    g = _load_graph(args.infile, args.largest_component)
    values = compute(args.kind, g).values
    header = "node,rank01" if args.ranks else "node,value"
    if args.ranks:
        values = normalize_ranks(values)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for i in range(g.n):
            fh.write(f"{_node_label(g, i)},{float(values[i])!r}\n")
    log.info("wrote %s for %d nodes", args.out, g.n)
    return 0


def _cmd_train(args):
    config = TrainConfig(
        model=args.model, centrality=args.centrality, seed=args.seed,
        data_seed=args.data_seed, steps=args.steps, batch_size=args.batch_size,
        eta=args.eta, eta_decay=args.eta_decay, eta_min=args.eta_min,
        weight_decay=args.weight_decay, layers=args.layers,
        embed_dim=args.embed_dim, num_graphs=args.num_graphs,
        min_nodes=args.min_nodes, max_nodes=args.max_nodes,
        graphs_dir=args.graphs_dir,
        checkpoint_interval=args.checkpoint_interval).resolved()
    resume = load_checkpoint(args.resume) if args.resume else None
    if args.checkpoint_dir:
        os.makedirs(args.checkpoint_dir, exist_ok=True)

    seen = [0]

    def on_batch(step, loss, eta):
        seen[0] += 1
        if seen[0] % args.log_every == 0:
            log.info("step=%d loss=%.6f eta=%.6f", step, loss, eta)

    final = train(config, resume_from=resume,
                  on_batch=on_batch if args.log_every else None,
                  checkpoint_dir=args.checkpoint_dir, workers=args.workers)
    save_checkpoint(final, args.out)
    log.info("trained %s/%s for %d steps -> %s", config.model, config.centrality,
             final.step, args.out)
    return 0


def _cmd_predict(args):
    ckpt = load_checkpoint(args.model_file)
    model = model_from_checkpoint(ckpt)
    g = _load_graph(args.infile, args.largest_component)
    scores = model.predict(g)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("node,score\n")
        for i in range(g.n):
            fh.write(f"{_node_label(g, i)},{float(scores[i])!r}\n")
    log.info("wrote %s: %d nodes scored for %s", args.out, g.n, model.centrality)
    return 0


def _cmd_evaluate(args):
    ckpt = load_checkpoint(args.model_file)
    model = model_from_checkpoint(ckpt)
    kind = args.centrality or model.centrality
    if kind != model.centrality and not args.allow_kind_mismatch:
        raise KindMismatchError(
            f"model was trained for {model.centrality!r} but --centrality is "
            f"{kind!r}; pass --allow-kind-mismatch to evaluate anyway")
    wanted = [s.strip() for s in args.sets.split(",") if s.strip()]
    known = ("sw", "sf", "rnd", "mix")
    for name in wanted:
        if name not in known:
            raise _UsageError(f"unknown test set {name!r}")
    sets = build_test_sets(args.seed, count=args.count,
                           min_n=args.min_nodes, max_n=args.max_nodes)
    rows = []
    for name in wanted:
        report = evaluate(model, sets[name], centrality=kind)
        rows.extend(report.rows)
        log.info("%s", report.summary())
    combined = EvalReport(rows=rows)
    if args.out:
        combined.to_csv(args.out)
        log.info("wrote %s (%d rows)", args.out, len(rows))
    mean = combined.mean_tau()
    log.info("overall mean tau-b: %.4f", mean)
    if args.tau_floor is not None and not mean >= args.tau_floor:
        raise _FloorError(f"mean tau-b {mean:.4f} below floor {args.tau_floor}")
    return 0


def _cmd_bench(args):
    ckpt = load_checkpoint(args.model_file)
    model = model_from_checkpoint(ckpt)
    try:
        targets = tuple(int(tok) for tok in args.edges.split(",") if tok.strip())
    except ValueError:
        raise _UsageError("--edges must be a comma list of integers")
    if not targets:
        raise _UsageError("--edges must name at least one target")
    edges, seconds, r2 = edge_ladder(model, edge_targets=targets,
                                     seed=args.seed, repeats=args.repeats)
    for e, s in zip(edges, seconds):
        log.info("edges=%d infer_s=%.6f", e, s)
    log.info("linear fit R^2 = %.4f", r2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("edges,infer_s\n")
            for e, s in zip(edges, seconds):
                fh.write(f"{e},{s:.6f}\n")
    return 0


_HANDLERS = {
    "generate": _cmd_generate,
    "centrality": _cmd_centrality,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "bench": _cmd_bench,
}


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    parser, sub = _build_parser()
    try:
        args = parser.parse_args(argv)
        args.argv = argv
        if args.command is None:
            parser.print_help(sys.stderr)
            return _USAGE_EXIT
        args = _apply_config_file(args, sub.choices[args.command], args.command)
        _log_run_header(args)
        return _HANDLERS[args.command](args)
    except _UsageError as exc:
        print(f"ncage: error: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    except _FloorError as exc:
        print(f"ncage: {exc}", file=sys.stderr)
        return _FLOOR_EXIT
    except InvalidParameterError as exc:
        print(f"ncage: error: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    except (EdgeListError, DisconnectedGraphError, CheckpointError,
            KindMismatchError, ConvergenceError) as exc:
        print(f"ncage: data error: {exc}", file=sys.stderr)
        return _DATA_EXIT
    except OSError as exc:
        print(f"ncage: data error: {exc}", file=sys.stderr)
        return _DATA_EXIT
    except NcageError as exc:
        print(f"ncage: error: {exc}", file=sys.stderr)
        return _DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
