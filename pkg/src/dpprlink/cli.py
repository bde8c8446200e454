"""Command-line front end.

Exit codes: 0 success, 1 computation failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from . import datasets
from .baselines import KatzConfig
from .dppr import SolverConfig, dppr_score
from .diffusion import DEFAULT_TIMES, diffuse_trace
from .evaluation import (AXES, METHODS, Protocol, SplitError, holdout_split, results_csv,
                         run_benchmark, summarize, summary_json, sweep, sweep_csv, timings_csv)
from .generators import BaParams, GenerationError, LfrParams, generate_ba, generate_lfr
from .graph import EdgelistParseError, Graph, parse_edgelist, serialize_edgelist, write_communities
from .linsolve import ConvergenceError
from .ppr import PprCache, ppr_solve, write_ppr_csv

log = logging.getLogger("dpprlink")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(Exception):
    pass


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    """Resolved run description; every field can come from YAML or flags."""

    input: dict = field(default_factory=dict)
    methods: list = field(default_factory=lambda: list(METHODS))
    solver: SolverConfig = field(default_factory=SolverConfig)
    katz: KatzConfig = field(default_factory=KatzConfig)
    protocol: Protocol = field(default_factory=Protocol)
    sweep: dict = field(default_factory=dict)
    output: dict = field(default_factory=lambda: {"dir": "results"})
    jobs: int = 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["protocol"] = {k: v for k, v in d["protocol"].items() if v is not None}
        return d


def _build(cls, data, where):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {sorted(unknown)}; allowed {sorted(known)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"{path}: YAML error{where}: {getattr(exc, 'problem', exc)}") from None
    return config_from_mapping(data, str(path))


def config_from_mapping(data: dict, where: str = "config") -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: top level must be a mapping")
    allowed = {f.name for f in fields(RunConfig)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {sorted(unknown)}; allowed {sorted(allowed)}")
    protocol = data.get("protocol")
    if isinstance(protocol, dict) and "seeds" in protocol:
        protocol = {**protocol, "seeds": tuple(protocol["seeds"])}
    cfg = RunConfig(
        input=data.get("input") or {},
        methods=list(data.get("methods") or METHODS),
        solver=_build(SolverConfig, data.get("solver"), f"{where}: solver"),
        katz=_build(KatzConfig, data.get("katz"), f"{where}: katz"),
        protocol=_build(Protocol, protocol, f"{where}: protocol"),
        sweep=data.get("sweep") or {},
        output=data.get("output") or {"dir": "results"},
        jobs=int(data.get("jobs", 1)),
    )
    bad = [m for m in cfg.methods if m not in METHODS]
    if bad or not cfg.methods:
        raise ConfigError(f"{where}: methods: unknown {bad}; choose from {list(METHODS)}")
    return cfg


def apply_overrides(cfg: RunConfig, args) -> RunConfig:
    """Command-line flags win over file values."""
    solver = {k: getattr(args, k) for k in ("alpha", "beta", "epsilon", "ppr_tol", "cg_tol")
              if getattr(args, k, None) is not None}
    katz = {}
    if getattr(args, "katz_damping", None) is not None:
        katz["damping"] = args.katz_damping
    protocol = {k: getattr(args, k) for k in ("fraction", "repeats", "seed")
                if getattr(args, k, None) is not None}
    try:
        cfg = replace(cfg, solver=replace(cfg.solver, **solver), katz=replace(cfg.katz, **katz),
                      protocol=replace(cfg.protocol, **protocol))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if getattr(args, "methods", None):
        cfg.methods = args.methods.split(",")
        bad = [m for m in cfg.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
    if getattr(args, "input", None):
        cfg.input = {"edgelist": args.input}
    if getattr(args, "dataset", None):
        cfg.input = {"dataset": args.dataset}
    if getattr(args, "out", None):
        cfg.output = {**cfg.output, "dir": args.out}
    if getattr(args, "jobs", None) is not None:
        cfg.jobs = args.jobs
    return cfg


def defaults_table() -> dict:
    return {
        "solver": asdict(SolverConfig()),
        "katz": asdict(KatzConfig()),
        "protocol": {"fraction": 0.1, "repeats": 30, "seed": 0},
        "ba": asdict(BaParams()),
        "lfr": asdict(LfrParams()),
        "diffusion_times": list(DEFAULT_TIMES),
    }


def _load_graph(path) -> Graph:
    if not Path(path).exists():
        raise CliError(f"input file not found: {path}")
    try:
        return parse_edgelist(Path(path))
    except EdgelistParseError as exc:
        raise CliError(f"{path}: {exc}") from None


def resolve_input(cfg: RunConfig):
    """Graph (or graph factory) named by ``cfg.input``; checked before any heavy work."""
    src = cfg.input
    if not src:
        raise ConfigError("input: give one of edgelist, dataset, generator")
    keys = set(src) & {"edgelist", "dataset", "generator"}
    if len(keys) != 1:
        raise ConfigError(f"input: exactly one of edgelist/dataset/generator required, got {sorted(src)}")
    if "edgelist" in src:
        return _load_graph(src["edgelist"])
    if "dataset" in src:
        try:
            return datasets.load_dataset(src["dataset"])
        except FileNotFoundError as exc:
            raise CliError(str(exc)) from None
    gen = dict(src["generator"])
    kind = gen.pop("kind", None)
    try:
        if kind == "ba":
            return generate_ba(BaParams(**gen))
        if kind == "lfr":
            return generate_lfr(LfrParams(**gen))[0]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"input.generator: {exc}") from None
    raise ConfigError(f"input.generator.kind must be 'ba' or 'lfr', got {kind!r}")


def _node(g: Graph, label) -> int:
    try:
        return g.index_of(label)
    except KeyError:
        raise CliError(f"unknown node label {label!r}") from None


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _sidecar(path: Path, payload: dict) -> None:
    _write(path.with_name(path.name + ".json"), json.dumps(payload, indent=2, default=str) + "\n")


# -- subcommands ------------------------------------------------------------

def cmd_score(args, cfg: RunConfig) -> int:
    g = _load_graph(args.graph)
    u, v = _node(g, args.u), _node(g, args.v)
    if u == v:
        raise CliError("score needs two distinct nodes")
    ps = dppr_score(g, u, v, cfg.solver)
    print(f"u={args.u} v={args.v} distance={ps.distance!r} score={ps.score!r}")
    print("config: " + json.dumps(cfg.solver.to_dict(), sort_keys=True))
    return EXIT_OK


def _benchmark_source(cfg: RunConfig):
    src = cfg.input
    if "generator" in src and src["generator"].get("kind") in ("ba", "lfr"):
        from functools import partial
        from .evaluation import _ba_source, _lfr_source
        gen = dict(src["generator"])
        kind = gen.pop("kind")
        gen.pop("seed", None)
        resolve_input(cfg)  # validates the parameters
        if kind == "ba":
            return partial(_ba_source, gen.get("n", 500), gen.get("m", 2))
        return partial(_lfr_source, LfrParams(**gen))
    return resolve_input(cfg)


def cmd_benchmark(args, cfg: RunConfig) -> int:
    source = _benchmark_source(cfg)
    out = Path(cfg.output.get("dir", "results"))
    results = run_benchmark(source, cfg.methods, cfg.protocol, cfg.solver, cfg.katz, cfg.jobs)
    _write(out / "results.csv", results_csv(results))
    _write(out / "timings.csv", timings_csv(results))
    _write(out / "summary.json", summary_json(results, cfg.to_dict()) + "\n")
    _print_summary(summarize(results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def _print_summary(rows):
    print(f"{'axis':<16}{'method':<8}{'mean_aupr':>10}{'std':>8}{'ok':>5}{'fail':>6}")
    for r in rows:
        print(f"{r['axis']:<16}{r['method']:<8}{r['mean_aupr']:>10.4f}{r['std_aupr']:>8.4f}"
              f"{r['n_ok']:>5}{r['n_failed']:>6}")


def cmd_sweep(args, cfg: RunConfig) -> int:
    axis = args.axis or cfg.sweep.get("axis")
    values = args.values or cfg.sweep.get("values")
    if axis not in AXES:
        raise ConfigError(f"sweep.axis must be one of {list(AXES)}, got {axis!r}")
    if not values:
        raise ConfigError("sweep.values must be a non-empty list")
    if isinstance(values, str):
        values = [float(x) if axis != "ba_m" else int(x) for x in values.split(",")]
    gen = dict(cfg.input.get("generator", {})) if cfg.input else {}
    gen.pop("kind", None)
    gen.pop("seed", None)
    graph = None
    ba, lfr = BaParams(), LfrParams()
    try:
        if axis in ("alpha", "beta"):
            graph = resolve_input(cfg)
        elif axis == "ba_m":
            ba = BaParams(n=gen.get("n", 500), m=1)
        else:
            lfr = LfrParams(**{k: v for k, v in gen.items() if k != "mu"})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"input.generator: {exc}") from None
    table = sweep(axis, values, cfg.protocol, cfg.methods, graph=graph, ba=ba, lfr=lfr,
                  solver=cfg.solver, katz=cfg.katz, jobs=cfg.jobs)
    out = Path(cfg.output.get("dir", "results"))
    _write(out / "sweep.csv", sweep_csv(table))
    _write(out / "results.csv", results_csv(table.results))
    _write(out / "timings.csv", timings_csv(table.results))
    conf = cfg.to_dict() | {"sweep": {"axis": axis, "values": list(values)}}
    _write(out / "summary.json", summary_json(table.results, conf) + "\n")
    _print_summary(summarize(table.results))
    failed = any(row["failed"] for row in table.rows) or not all(r.ok for r in table.results)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_generate(args, cfg: RunConfig) -> int:
    out = Path(args.output)
    try:
        if args.kind == "ba":
            params = BaParams(n=args.n or 500, m=args.m or 2, seed=args.seed)
            g, comms = generate_ba(params), None
        else:
            extra = {k: getattr(args, k) for k in ("tau1", "tau2", "avg_degree", "min_community",
                                                  "max_degree", "max_community")
                     if getattr(args, k) is not None}
            params = LfrParams(n=args.n or 250, mu=args.mu, seed=args.seed, **extra)
            g, comms = generate_lfr(params)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _write(out, serialize_edgelist(g))
    meta = {"generator": args.kind, "params": asdict(params), "n": g.n, "m": g.m}
    if comms is not None:
        comm_path = out.with_suffix(".communities")
        _write(comm_path, write_communities(comms))
        meta["communities"] = str(comm_path)
    _sidecar(out, meta)
    print(f"wrote {out} (n={g.n}, m={g.m})")
    return EXIT_OK


def cmd_split(args, cfg: RunConfig) -> int:
    g = _load_graph(args.graph)
    split = holdout_split(g, cfg.protocol.fraction, cfg.protocol.seed)
    out = Path(cfg.output.get("dir", "split"))
    _write(out / "train.edges", "".join(f"{g.labels[a]} {g.labels[b]}\n" for a, b in split.train.edges()))
    for name, arr in (("positives", split.positives), ("negatives", split.negatives)):
        _write(out / f"{name}.tsv", "".join(f"{g.labels[a]}\t{g.labels[b]}\n" for a, b in arr))
    _sidecar(out / "train.edges", {"fraction": split.holdout_fraction, "seed": split.seed,
                                   "n": g.n, "train_m": split.train.m,
                                   "n_pos": len(split.positives), "n_neg": len(split.negatives),
                                   "labels": list(g.labels)})
    print(f"train m={split.train.m}, {len(split.positives)} positives, {len(split.negatives)} negatives")
    return EXIT_OK


def cmd_diffuse(args, cfg: RunConfig) -> int:
    g = _load_graph(args.graph)
    s0 = np.zeros(g.n)
    s0[_node(g, args.source)] = 1.0
    times = [float(t) for t in args.times.split(",")] if args.times else list(DEFAULT_TIMES)
    try:
        trace = diffuse_trace(g, s0, times, args.steps_per_unit)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    out = Path(args.output)
    _write(out, trace.to_csv())
    _sidecar(out, {"source": args.source, "times": times, "steps_per_unit": args.steps_per_unit,
                   "labels": list(g.labels)})
    return EXIT_OK


def cmd_ppr(args, cfg: RunConfig) -> int:
    g = _load_graph(args.graph)
    u = _node(g, args.source)
    cache = PprCache.from_env()
    vec = cache.get(g, u, cfg.solver.ppr) if cache else None
    if vec is None:
        vec = ppr_solve(g, u, cfg.solver.ppr)
        if cache:
            cache.put(g, vec, cfg.solver.ppr)
    text = write_ppr_csv(vec, g.labels)
    if args.output:
        out = Path(args.output)
        _write(out, text)
        _sidecar(out, {"source": args.source, "ppr": asdict(cfg.solver.ppr)})
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--alpha", type=float, help="diffusion coefficient (default 1.0)")
    g.add_argument("--beta", type=float, help="PPR continuation probability (default 0.85)")
    g.add_argument("--epsilon", type=float, help="score regularizer (default 1e-10)")
    g.add_argument("--ppr-tol", type=float)
    g.add_argument("--cg-tol", type=float)
    g.add_argument("--katz-damping", type=float)


def _add_run_flags(p):
    p.add_argument("--config", help="YAML run config; flags override it")
    p.add_argument("--input", help="edgelist path")
    p.add_argument("--dataset", help="named dataset, e.g. karate")
    p.add_argument("--methods", help=f"comma list from {','.join(METHODS)}")
    p.add_argument("--fraction", type=float)
    p.add_argument("--repeats", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int, help="worker processes (results do not depend on it)")
    _add_solver_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpprlink", description=__doc__.splitlines()[0])
    parser.add_argument("--show-config", action="store_true", help="print default parameters and exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("score", help="D-PPR distance and score of one node pair")
    p.add_argument("graph")
    p.add_argument("u")
    p.add_argument("v")
    p.add_argument("--config")
    _add_solver_flags(p)

    p = sub.add_parser("benchmark", help="holdout benchmark over repeats")
    _add_run_flags(p)

    p = sub.add_parser("sweep", help="benchmark across one parameter axis")
    _add_run_flags(p)
    p.add_argument("--axis", choices=AXES)
    p.add_argument("--values", help="comma-separated axis values")

    p = sub.add_parser("generate", help="write a synthetic network")
    p.add_argument("kind", choices=("ba", "lfr"))
    p.add_argument("output")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--mu", type=float, default=0.3)
    p.add_argument("--tau1", type=float)
    p.add_argument("--tau2", type=float)
    p.add_argument("--avg-degree", type=float)
    p.add_argument("--min-community", type=int)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--max-community", type=int)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("split", help="write one holdout split")
    p.add_argument("graph")
    p.add_argument("--fraction", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--config")

    p = sub.add_parser("diffuse", help="heat-diffusion snapshots as CSV")
    p.add_argument("graph")
    p.add_argument("source", help="node label holding the initial unit mass")
    p.add_argument("output")
    p.add_argument("--times", help="comma-separated times (default 0,0.5,1,2,5)")
    p.add_argument("--steps-per-unit", type=int, default=100)

    p = sub.add_parser("ppr", help="dump a PPR vector as CSV")
    p.add_argument("graph")
    p.add_argument("source")
    p.add_argument("--output")
    p.add_argument("--config")
    _add_solver_flags(p)
    return parser


COMMANDS = {"score": cmd_score, "benchmark": cmd_benchmark, "sweep": cmd_sweep,
            "generate": cmd_generate, "split": cmd_split, "diffuse": cmd_diffuse, "ppr": cmd_ppr}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.show_config:
        print(yaml.safe_dump(defaults_table(), sort_keys=False), end="")
        return EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
        cfg = apply_overrides(cfg, args)
        if args.command in ("benchmark", "sweep") and cfg.input.get("edgelist"):
            if not Path(cfg.input["edgelist"]).exists():
                raise CliError(f"input file not found: {cfg.input['edgelist']}")
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, CliError) as exc:
        print(f"dpprlink: error: {exc}", file=sys.stderr)
        return getattr(exc, "code", EXIT_USAGE)
    except (ConvergenceError, GenerationError, SplitError, RuntimeError) as exc:
        print(f"dpprlink: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
