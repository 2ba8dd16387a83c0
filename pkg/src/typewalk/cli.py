"""Command-line front end.

Subcommands: ``motifs`` (feature extraction), ``embed`` (full pipeline to
an embedding), ``eval`` (link-prediction AUC report), ``analyze``
(random-walk diagnostics), ``sweep`` (grid expansion over binning and walk
bias parameters). Every run writes a JSON manifest with the resolved
parameters so it can be reproduced bit-for-bit; flags override values
loaded from ``--config`` (a flat JSON object of flag defaults).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (check_access_time, check_edge_visits,
                       check_first_passage_bound)
from .embedding import TrainConfig
from .errors import ParameterError, TypewalkError
from .evaluation import EDGE_OPERATORS, evaluate_pipeline
from .graph import Graph, WalkParams, is_connected, load_edge_list
from .motifs import bin_features, count_motifs, ingest_attributes
from .pipeline import PhiConfig, embed_graph, node_features

log = logging.getLogger(__name__)

DELTA_GRID = (0.01, 0.1, 0.5, 0.9, 0.99)
PQ_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="edge-list file (whitespace separated, # or %% comments)")
    p.add_argument("--out", default="typewalk_out", help="output directory")
    p.add_argument("--config", default=None, help="JSON file of flag defaults; flags win")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1,
                   help="reserved; all current code paths are deterministic single-threaded")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_phi(p: argparse.ArgumentParser) -> None:
    p.add_argument("--phi", choices=("concat", "factorized", "identity", "external"),
                   default="concat")
    p.add_argument("--features", default="x1,x2,x3,x4,x5,x6,x7,x8,x9",
                   help="comma-separated feature columns for typing")
    p.add_argument("--delta", type=float, default=0.5, help="bin fraction in (0,1)")
    p.add_argument("--bin-op", choices=("concat", "sum"), default="concat",
                   help="how selected binned values combine into a type key")
    p.add_argument("--rank", type=int, default=10, help="factorization rank")
    p.add_argument("--num-types", type=int, default=16,
                   help="cluster count for factorized typing")
    p.add_argument("--attributes", default=None, help="TSV of external node attributes")
    p.add_argument("--assignment", default=None, help="node->type TSV for --phi external")


def _add_walk_train(p: argparse.ArgumentParser) -> None:
    p.add_argument("--walks-per-node", "-R", type=int, default=10)
    p.add_argument("--walk-length", "-L", type=int, default=80)
    p.add_argument("--p", type=float, default=1.0, help="return bias")
    p.add_argument("--q", type=float, default=1.0, help="in-out bias")
    p.add_argument("--order", choices=("auto", "first", "second"), default="auto")
    p.add_argument("--dims", "-D", type=int, default=128)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--eta0", type=float, default=0.025)
    p.add_argument("--epochs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="typewalk",
                                 description="Graph embeddings from type-labeled random walks.")
    ap.add_argument("--version", action="version", version=f"typewalk {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("motifs", help="write per-node motif participation counts")
    _add_common(p)
    p.add_argument("--features", default=None,
                   help="restrict output to these columns (comma separated)")
    p.add_argument("--attributes", default=None, help="TSV of external node attributes")
    p.add_argument("--binned", action="store_true", help="also write the binned matrix")
    p.add_argument("--delta", type=float, default=0.5)

    p = sub.add_parser("embed", help="types + walks + skip-gram embedding")
    _add_common(p)
    _add_phi(p)
    _add_walk_train(p)
    p.add_argument("--save-corpus", action="store_true", help="also write the walk corpus")
    p.add_argument("--save-beta", action="store_true", help="also write context vectors")

    p = sub.add_parser("eval", help="link-prediction AUC over repeated seeds")
    _add_common(p)
    _add_phi(p)
    _add_walk_train(p)
    p.add_argument("--operators", default="hadamard",
                   help=f"comma separated from {EDGE_OPERATORS}")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--allow-isolation", action="store_true",
                   help="let edge removal isolate nodes (inductive demos)")

    p = sub.add_parser("analyze", help="random-walk reachability diagnostics")
    _add_common(p)
    p.add_argument("--lemma", choices=("1", "2", "3", "all"), default="all")
    p.add_argument("--u", type=int, default=None, help="start node (internal id)")
    p.add_argument("--v", type=int, default=None, help="target node (internal id)")
    p.add_argument("--t", type=int, default=3, help="first-passage step for lemma 1")
    p.add_argument("--L", type=int, default=10, help="walk length for lemma 3")
    p.add_argument("--trials", type=int, default=10000)

    p = sub.add_parser("sweep", help="cartesian grid over delta and walk-bias values")
    _add_common(p)
    _add_phi(p)
    _add_walk_train(p)
    p.add_argument("--operators", default="hadamard")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--allow-isolation", action="store_true")
    p.add_argument("--delta-grid", default=",".join(str(x) for x in DELTA_GRID))
    p.add_argument("--p-grid", default=",".join(str(x) for x in PQ_GRID))
    p.add_argument("--q-grid", default=",".join(str(x) for x in PQ_GRID))
    return ap


def _apply_config_file(ap: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    # first parse finds --config; the file then supplies defaults and the
    # command line is parsed again on top, so explicit flags always win
    args = ap.parse_args(argv)
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ParameterError(f"{args.config}: config must be a JSON object")
        unknown = [k for k in loaded if not hasattr(args, k)]
        if unknown:
            raise ParameterError(f"{args.config}: unknown config keys {unknown}")
        sub = next(a for a in ap._subparsers._group_actions[0].choices.values()
                   if a.prog.endswith(args.command))
        sub.set_defaults(**loaded)
        args = ap.parse_args(argv)
    return args


def _csv_list(text: str) -> tuple:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def _phi_config(args) -> PhiConfig:
    return PhiConfig(kind=args.phi,
                     features=_csv_list(args.features) if args.features else (),
                     delta=args.delta, bin_op=args.bin_op, rank=args.rank,
                     num_types=args.num_types, attributes_path=args.attributes,
                     assignment_path=args.assignment)


def _walk_params(args) -> WalkParams:
    return WalkParams(walks_per_node=args.walks_per_node, walk_length=args.walk_length,
                      return_param=args.p, inout_param=args.q)


def _train_config(args) -> TrainConfig:
    return TrainConfig(dims=args.dims, window=args.window, negatives=args.negatives,
                       eta0=args.eta0, epochs=args.epochs, seed=args.seed)


def _resolved_params(args) -> dict:
    skip = {"verbose", "config"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write_manifest(out: Path, name: str, args, extra: dict) -> None:
    manifest = {"tool": "typewalk", "version": __version__, "command": args.command,
                "params": _resolved_params(args)}
    manifest.update(extra)
    with open(out / name, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def cmd_motifs(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graph = load_edge_list(args.input)
    feats = count_motifs(graph)
    if args.attributes:
        feats = feats.hstack(ingest_attributes(args.attributes, graph))
    if args.features:
        feats = feats.select(_csv_list(args.features))
    feats.to_tsv(graph, out / "features.tsv")
    written = ["features.tsv"]
    if args.binned:
        binned = bin_features(feats, args.delta)
        with open(out / "binned.tsv", "w", encoding="utf-8") as fh:
            fh.write("node\t" + "\t".join(binned.labels) + "\n")
            for i in range(binned.num_nodes):
                row = "\t".join(str(v) for v in binned.values[i])
                fh.write(f"{graph.original_ids[i]}\t{row}\n")
        written.append("binned.tsv")
    _write_manifest(out, "motifs_manifest.json", args,
                    {"num_nodes": graph.num_nodes, "num_edges": graph.num_edges,
                     "outputs": written})
    print(f"wrote {', '.join(written)} to {out}")
    return 0


def cmd_embed(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graph = load_edge_list(args.input)
    result = embed_graph(graph, _phi_config(args), _walk_params(args),
                         _train_config(args), seed=args.seed, order=args.order)
    result.model.save(out / "embedding.txt",
                      beta_path=(out / "embedding.beta.txt") if args.save_beta else None)
    result.assignment.to_tsv(graph, out / "assignment.tsv")
    written = ["embedding.txt", "assignment.tsv"]
    if args.save_beta:
        written.append("embedding.beta.txt")
    if args.save_corpus:
        result.corpus.save_text(out / "corpus.txt")
        written.append("corpus.txt")
    _write_manifest(out, "embed_manifest.json", args, {
        "num_nodes": graph.num_nodes, "num_edges": graph.num_edges,
        "num_types": result.num_types, "embedding_bytes": result.storage_bytes(),
        "timings_ms": {k: round(v, 3) for k, v in result.timings_ms.items()},
        "outputs": written})
    print(f"num_types={result.num_types} embedding_bytes={result.storage_bytes()} -> {out}")
    return 0


def _run_eval(graph, args, phi, walk_params, operators, seeds):
    rows = []
    for seed in seeds:
        cfg = TrainConfig(dims=args.dims, window=args.window, negatives=args.negatives,
                          eta0=args.eta0, epochs=args.epochs, seed=seed)
        rows.extend(evaluate_pipeline(graph, phi, walk_params, cfg,
                                      operators=operators, seed=seed,
                                      fraction=args.fraction,
                                      forbid_isolation=not args.allow_isolation))
    return rows


def _write_eval_tsv(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("seed\toperator\tphi\tm\tD\tauc\tembedding_bytes\truntime_ms\n")
        for r in rows:
            fh.write(f"{r.seed}\t{r.operator}\t{r.phi_kind}\t{r.num_types}\t{r.dims}"
                     f"\t{r.auc:.6f}\t{r.embedding_bytes}\t{r.runtime_ms:.1f}\n")


def cmd_eval(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graph = load_edge_list(args.input)
    operators = _csv_list(args.operators)
    for op in operators:
        if op not in EDGE_OPERATORS:
            raise ParameterError(f"unknown operator {op!r}")
    seeds = [args.seed + k for k in range(args.repeats)]
    rows = _run_eval(graph, args, _phi_config(args), _walk_params(args), operators, seeds)
    _write_eval_tsv(out / "eval.tsv", rows)
    summary = {}
    for op in operators:
        vals = np.array([r.auc for r in rows if r.operator == op])
        summary[op] = {"mean_auc": round(float(vals.mean()), 6),
                       "std_auc": round(float(vals.std(ddof=1)) if vals.size > 1 else 0.0, 6),
                       "seeds": len(vals)}
        print(f"{op}: AUC {summary[op]['mean_auc']:.4f} +/- {summary[op]['std_auc']:.4f} "
              f"over {len(vals)} seed(s)")
    _write_manifest(out, "eval_manifest.json", args,
                    {"summary": summary, "outputs": ["eval.tsv"]})
    return 0


def _pick_nonadjacent_pair(graph) -> tuple[int, int]:
    for u in range(graph.num_nodes):
        for v in range(u + 1, graph.num_nodes):
            if not graph.has_edge(u, v):
                return u, v
    raise ParameterError("graph is complete; no non-adjacent pair exists")


def cmd_analyze(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graph = load_edge_list(args.input)
    if not is_connected(graph):
        raise ParameterError("analyze expects a connected graph")
    if (args.u is None) != (args.v is None):
        raise ParameterError("give both --u and --v or neither")
    u, v = (args.u, args.v) if args.u is not None else _pick_nonadjacent_pair(graph)
    lines = ["check\tquantity\testimate\texact\tbound\tpass"]
    if args.lemma in ("1", "all"):
        rep = check_first_passage_bound(graph, u, v, args.t)
        lines.append(f"first_passage\tr[{u}->{v}]@{args.t}\t{rep.r_uv_t:.10g}"
                     f"\t{rep.neighbor_mean:.10g}\twitness={rep.witness}\t{rep.passed}")
    if args.lemma in ("2", "all"):
        rep = check_access_time(graph, u, v, trials=args.trials, seed=args.seed)
        lines.append(f"access_time\th[{u}->{v}]\t{rep.empirical_prob:.6f}"
                     f"\t{rep.h_uv:.10g}\t0.5+3sig={0.5 + 3 * rep.sigma:.6f}\t{rep.passed}")
    if args.lemma in ("3", "all"):
        rep = check_edge_visits(graph, args.L, trials=min(args.trials, 2000), seed=args.seed)
        worst = int(np.argmax(rep.directed_means - 3 * rep.directed_sigmas))
        lines.append(f"edge_visits\tmax_mean_traversals\t{rep.directed_means[worst]:.6f}"
                     f"\t{float(args.L)}\tL+3sig\t{rep.passed}")
    report = "\n".join(lines) + "\n"
    (out / "analysis.tsv").write_text(report, encoding="utf-8")
    sys.stdout.write(report)
    ok = all(line.rsplit("\t", 1)[1] == "True" for line in lines[1:])
    _write_manifest(out, "analyze_manifest.json", args,
                    {"u": u, "v": v, "passed": ok, "outputs": ["analysis.tsv"]})
    return 0 if ok else 4


def cmd_sweep(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graph = load_edge_list(args.input)
    operators = _csv_list(args.operators)
    deltas = [float(x) for x in _csv_list(args.delta_grid)]
    ps = [float(x) for x in _csv_list(args.p_grid)]
    qs = [float(x) for x in _csv_list(args.q_grid)]
    seeds = [args.seed + k for k in range(args.repeats)]
    rows = []
    header = "delta\tp\tq\toperator\tmean_auc\tstd_auc\tmean_m\n"
    for delta in deltas:
        phi = PhiConfig(kind=args.phi, features=_csv_list(args.features),
                        delta=delta, bin_op=args.bin_op, rank=args.rank,
                        num_types=args.num_types, attributes_path=args.attributes,
                        assignment_path=args.assignment)
        for p in ps:
            for q in qs:
                wp = WalkParams(walks_per_node=args.walks_per_node,
                                walk_length=args.walk_length,
                                return_param=p, inout_param=q)
                reports = _run_eval(graph, args, phi, wp, operators, seeds)
                for op in operators:
                    vals = np.array([r.auc for r in reports if r.operator == op])
                    ms = np.array([r.num_types for r in reports if r.operator == op])
                    rows.append(f"{delta}\t{p}\t{q}\t{op}\t{vals.mean():.6f}"
                                f"\t{vals.std(ddof=1) if vals.size > 1 else 0.0:.6f}"
                                f"\t{ms.mean():.1f}")
    (out / "sweep.tsv").write_text(header + "\n".join(rows) + "\n", encoding="utf-8")
    _write_manifest(out, "sweep_manifest.json", args,
                    {"grid_size": len(rows), "outputs": ["sweep.tsv"]})
    print(f"wrote sweep.tsv ({len(rows)} rows) to {out}")
    return 0


_COMMANDS = {"motifs": cmd_motifs, "embed": cmd_embed, "eval": cmd_eval,
             "analyze": cmd_analyze, "sweep": cmd_sweep}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = _apply_config_file(ap, list(sys.argv[1:] if argv is None else argv))
    except TypewalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads != 1:
        log.info("parallel mode is not implemented; running single-threaded")
    started = time.perf_counter()
    try:
        code = _COMMANDS[args.command](args)
    except TypewalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log.debug("%s finished in %.1f ms", args.command, (time.perf_counter() - started) * 1e3)
    return code


if __name__ == "__main__":
    sys.exit(main())
