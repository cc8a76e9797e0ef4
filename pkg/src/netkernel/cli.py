"""Command-line front end: validation, distances, kernel evaluation
grids, positive-definiteness audits, simulation, fitting, and the full
simulation study.

Conventions shared by every subcommand:

- exit 0 on success, 1 on a validation failure (bad graph geometry, a
  failed audit, a kernel refused under ``--strict``), 2 on malformed
  input (unparseable files, unknown config keys, bad values);
- config files are parsed strictly — unknown keys are errors;
- when ``--out DIR`` is given, the resolved configuration and seed are
  logged to ``DIR/run.json`` so the run can be replayed byte-for-byte;
- a missing seed is drawn from OS entropy and surfaced in ``run.json``;
- ``--threads`` (fallback: the ``NETKERNEL_THREADS`` environment
  variable) never changes any output, only wall-clock time;
- ``--strict`` refuses to simulate/fit/run studies with a kernel whose
  validity verdict is invalid; the default warns and proceeds, which is
  what lets the deliberately misspecified ambient-Euclidean competitor
  run at all.

All CSV floats carry 17 significant digits so round-trips are bit-exact.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import (
    FileFormatError,
    InconsistentNetworkError,
    InvalidParamsError,
    MetricMismatchError,
    MissingCoordinatesError,
    NetkernelError,
    NetworkBuildError,
    NotPositiveDefiniteError,
    SingularSystemError,
)
from .gp import SimSpec, SpaceTimeDesign, fit, simulate
from .kernels import MODEL_SHORTCUTS, kernel_from_json, kernel_to_json, load_kernel
from .metrics import SPATIAL_METRICS, distance_matrix
from .network import (check_distance_consistency, classify_topology,
                      load_network, load_points, network_diameter,
                      save_points)
from .pdcheck import AuditConfig, audit
from .study import (config_to_json, parse_network_source, require_key,
                    run_sim_study, strict_object, study_config_from_json,
                    write_replicates_csv, write_summary_csv)
from .validity import UNKNOWN, check_validity

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_MALFORMED = 2


class _Refusal(Exception):
    """Raised when --strict rejects a run; mapped to exit 1."""


def _g17(value) -> str:
    return format(float(value), ".17g")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(
            f"{path}: line {exc.lineno}: {exc.msg}") from exc


def _load_spec(spec_arg: str):
    """--spec accepts a shortcut name (T, C1, C2) or a JSON file path."""
    if spec_arg in MODEL_SHORTCUTS:
        return kernel_from_json(spec_arg)
    return load_kernel(spec_arg)


def _resolve_seed(flag_seed, cfg_seed):
    """--seed flag beats the config seed; absent both, draw from entropy."""
    if flag_seed is not None:
        return int(flag_seed)
    if cfg_seed is not None:
        return int(cfg_seed)
    return int(np.random.SeedSequence().entropy % (2 ** 63))


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        n = args.threads
    else:
        env = os.environ.get("NETKERNEL_THREADS", "").strip()
        if env:
            try:
                n = int(env)
            except ValueError:
                raise InvalidParamsError(
                    f"NETKERNEL_THREADS={env!r} is not an integer")
        else:
            n = 1
    if n < 1:
        raise InvalidParamsError("threads must be >= 1")
    return n


def _ensure_out(args) -> str:
    if not args.out:
        raise FileFormatError(
            f"subcommand {args.command!r} writes artifacts; --out DIR is "
            f"required")
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write_run_json(out_dir, command, config_obj, seed, threads, strict):
    payload = {"command": command, "config": config_obj, "seed": seed,
               "threads": threads, "strict": bool(strict)}
    with open(os.path.join(out_dir, "run.json"), "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _gate_kernel(kernel, topo, strict, label):
    """Apply the validity verdict policy: invalid refuses under --strict,
    warns otherwise; unknown always gets a note."""
    verdict = check_validity(kernel, topo)
    if verdict.is_invalid:
        msg = f"kernel {label}: verdict invalid ({verdict.reason})"
        if strict:
            raise _Refusal(msg)
        print(f"warning: {msg}; proceeding without --strict",
              file=sys.stderr)
    elif verdict.status == UNKNOWN:
        print(f"note: kernel {label}: verdict unknown ({verdict.reason})",
              file=sys.stderr)
    return verdict


# ---------------------------------------------------------------------------
# graph
# ---------------------------------------------------------------------------

def _cmd_graph_validate(args) -> int:
    net = load_network(args.path)
    bad = check_distance_consistency(net)
    if bad:
        for eid in bad:
            e = net.edge(eid)
            print(f"{args.path}: edge {eid} ({e.u}-{e.v}, length "
                  f"{e.length:g}) exceeds the shortest alternative path "
                  f"between its endpoints", file=sys.stderr)
        print(f"invalid: {len(bad)} edge(s) break distance consistency")
        return EXIT_VALIDATION
    print(f"ok: {net.n_vertices} vertices, {net.n_edges} edges, "
          f"connected, distance-consistent")
    if args.out:
        out = _ensure_out(args)
        _write_run_json(out, "graph validate", {"network": args.path},
                        None, 1, args.strict)
    return EXIT_OK


def _graph_info(net) -> dict:
    topo = classify_topology(net)
    return {
        "n_vertices": net.n_vertices,
        "n_edges": net.n_edges,
        "total_length": net.total_length,
        "diameter": network_diameter(net),
        "topology": {"kind": topo.kind, "leaf_count": topo.leaf_count},
        "has_coords": net.has_coords(),
        "distance_consistent": not check_distance_consistency(net),
    }


def _cmd_graph_info(args) -> int:
    net = load_network(args.path)
    info = _graph_info(net)
    print(json.dumps(info, indent=1))
    if args.out:
        out = _ensure_out(args)
        with open(os.path.join(out, "info.json"), "w") as fh:
            json.dump(info, fh, indent=1)
            fh.write("\n")
        _write_run_json(out, "graph info", {"network": args.path},
                        None, 1, args.strict)
    return EXIT_OK


# ---------------------------------------------------------------------------
# dist
# ---------------------------------------------------------------------------

def _cmd_dist(args) -> int:
    net = load_network(args.network)
    ids, points = load_points(net, args.points)
    dmat = distance_matrix(net, points, args.metric)
    lines = [",".join(ids)]
    for row in dmat.values:
        lines.append(",".join(_g17(v) for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        out = _ensure_out(args)
        with open(os.path.join(out, "distances.csv"), "w") as fh:
            fh.write(text)
        _write_run_json(out, "dist",
                        {"network": args.network, "points": args.points,
                         "metric": args.metric}, None, 1, args.strict)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# kernel eval
# ---------------------------------------------------------------------------

def _check_monotone(grid, name):
    arr = [float(v) for v in grid]
    if any(b < a for a, b in zip(arr, arr[1:])):
        raise InvalidParamsError(f"--{name} grid must be nondecreasing")
    return arr


def emit_eval_grid(spec, d_grid, u_grid, out_path) -> None:
    """Write the kernel surface over a (distance, time-lag) grid as CSV
    with columns d,u,value in d-major row order."""
    d_grid = _check_monotone(d_grid, "d")
    u_grid = _check_monotone(u_grid, "u")
    with open(out_path, "w") as fh:
        fh.write("d,u,value\n")
        for d in d_grid:
            for u in u_grid:
                fh.write(f"{_g17(d)},{_g17(u)},"
                         f"{_g17(spec.evaluate(d, u))}\n")


def _cmd_kernel_eval(args) -> int:
    spec = _load_spec(args.spec)
    d_grid = _check_monotone(args.d if args.d is not None else [0.0], "d")
    u_grid = _check_monotone(args.u if args.u is not None else [0.0], "u")
    lines = ["d,u,value"]
    for d in d_grid:
        for u in u_grid:
            lines.append(f"{_g17(d)},{_g17(u)},{_g17(spec.evaluate(d, u))}")
    print("\n".join(lines))
    if args.out:
        out = _ensure_out(args)
        emit_eval_grid(spec, d_grid, u_grid, os.path.join(out, "eval.csv"))
        _write_run_json(out, "kernel eval",
                        {"spec": kernel_to_json(spec), "d": d_grid,
                         "u": u_grid}, None, 1, args.strict)
    return EXIT_OK


# ---------------------------------------------------------------------------
# pd check
# ---------------------------------------------------------------------------

_AUDIT_KEYS = ("n_points", "n_times", "n_trials", "seed", "rel_tol")


def _cmd_pd_check(args) -> int:
    spec = _load_spec(args.spec)
    net = load_network(args.net)
    cfg_obj = _load_json(args.config) if args.config else {}
    strict_object(cfg_obj, _AUDIT_KEYS, "audit config")
    seed = _resolve_seed(args.seed, cfg_obj.get("seed"))
    try:
        acfg = AuditConfig(n_points=int(cfg_obj.get("n_points", 40)),
                           n_times=int(cfg_obj.get("n_times", 2)),
                           n_trials=int(cfg_obj.get("n_trials", 10)),
                           seed=seed,
                           rel_tol=float(cfg_obj.get("rel_tol", 1e-8)))
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"bad value in audit config: {exc}") from exc
    report = audit(spec, net, acfg)
    payload = {
        "verdict": report.verdict,
        "min_eig_ratio": report.min_eig_ratio,
        "rel_tol": report.rel_tol,
        "n_trials": report.n_trials,
        "worst_points": None,
        "worst_times": list(report.worst_times),
    }
    if args.out:
        out = _ensure_out(args)
        ids = [f"p{i}" for i in range(len(report.worst_points))]
        save_points(ids, report.worst_points,
                    os.path.join(out, "worst_points.csv"))
        payload["worst_points"] = "worst_points.csv"
        with open(os.path.join(out, "report.json"), "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
        _write_run_json(out, "pd check",
                        {"spec": kernel_to_json(spec), "network": args.net,
                         "audit": {"n_points": acfg.n_points,
                                   "n_times": acfg.n_times,
                                   "n_trials": acfg.n_trials,
                                   "seed": acfg.seed,
                                   "rel_tol": acfg.rel_tol}},
                        seed, 1, args.strict)
    print(json.dumps(payload, indent=1))
    return EXIT_OK if report.passed else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_SIM_KEYS = ("kernel", "network", "points", "times_per_point", "nugget",
             "n_reps", "seed")

DESIGN_HEADER = "point_id,kind,ref_id,offset,time"


def _write_design_csv(path, points, times) -> None:
    with open(path, "w") as fh:
        fh.write(DESIGN_HEADER + "\n")
        for i, (p, t) in enumerate(zip(points, times)):
            off = "" if p.is_vertex else _g17(p.offset)
            fh.write(f"r{i},{p.kind},{p.ref},{off},{_g17(t)}\n")


def _read_design_csv(net, path):
    points = []
    times = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != DESIGN_HEADER:
            raise FileFormatError(
                f"{path}: line 1: header must be {DESIGN_HEADER}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise FileFormatError(
                    f"{path}: line {lineno}: expected 5 fields")
            _, kind, ref, off, t = parts
            try:
                if kind == "vertex":
                    points.append(net.point_at_vertex(int(ref)))
                elif kind == "edge":
                    points.append(net.point_on_edge(int(ref), float(off)))
                else:
                    raise FileFormatError(
                        f"{path}: line {lineno}: kind must be 'vertex' "
                        f"or 'edge'")
                times.append(float(t))
            except (InvalidParamsError, ValueError) as exc:
                raise FileFormatError(
                    f"{path}: line {lineno}: {exc}") from exc
    if not points:
        raise FileFormatError(f"{path}: no design rows")
    return points, np.array(times)


def _write_draws_csv(path, draws) -> None:
    n_reps, n = draws.shape
    with open(path, "w") as fh:
        fh.write(",".join(f"rep_{r}" for r in range(n_reps)) + "\n")
        for i in range(n):
            fh.write(",".join(_g17(draws[r, i])
                              for r in range(n_reps)) + "\n")


def _read_draws_column(path, rep: int) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if rep < 0 or rep >= len(header):
            raise FileFormatError(
                f"{path}: replicate column {rep} out of range "
                f"(file has {len(header)})")
        vals = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(header):
                raise FileFormatError(
                    f"{path}: line {lineno}: expected {len(header)} fields")
            try:
                vals.append(float(parts[rep]))
            except ValueError as exc:
                raise FileFormatError(
                    f"{path}: line {lineno}: {exc}") from exc
    return np.array(vals)


def _parse_points_source(obj, net, seed):
    strict_object(obj, ("sample", "file"), "points")
    if ("sample" in obj) == ("file" in obj):
        raise FileFormatError(
            "points needs exactly one of 'sample' or 'file'")
    if "file" in obj:
        _, pts = load_points(net, obj["file"])
        return pts
    sample = strict_object(obj["sample"], ("n", "seed"), "points.sample")
    n = int(require_key(sample, "n", "points.sample"))
    from .network import sample_points
    return sample_points(net, n, seed=int(sample.get("seed", seed)))


def _cmd_simulate(args) -> int:
    if not args.config:
        raise FileFormatError("simulate requires --config")
    cfg = strict_object(_load_json(args.config), _SIM_KEYS,
                        "simulate config")
    seed = _resolve_seed(args.seed, cfg.get("seed"))
    kernel = kernel_from_json(require_key(cfg, "kernel", "simulate config"))
    net, recipe = parse_network_source(
        require_key(cfg, "network", "simulate config"), default_seed=seed)
    base_points = _parse_points_source(
        require_key(cfg, "points", "simulate config"), net, seed)
    k = int(cfg.get("times_per_point", 1))
    if k < 1:
        raise FileFormatError("times_per_point must be >= 1")
    nugget = float(cfg.get("nugget", 0.0))
    n_reps = int(require_key(cfg, "n_reps", "simulate config"))

    points = [p for p in base_points for _ in range(k)]
    rng = np.random.default_rng([seed, 0, 0])
    if kernel.time == "circular":
        times = rng.random(len(points)) * 2.0 * np.pi
    else:
        times = rng.random(len(points))
    design = SpaceTimeDesign(net, points, times, time_kind=kernel.time)

    _gate_kernel(kernel, classify_topology(net), args.strict, "simulate")
    draws = simulate(design, SimSpec(kernel, nugget, seed), n_reps)

    out = _ensure_out(args)
    _write_design_csv(os.path.join(out, "design.csv"), points, times)
    _write_draws_csv(os.path.join(out, "draws.csv"), draws)
    resolved = dict(cfg)
    resolved["network"] = recipe
    resolved["seed"] = seed
    _write_run_json(out, "simulate", resolved, seed, 1, args.strict)
    print(f"wrote design.csv ({len(points)} rows) and draws.csv "
          f"({n_reps} replicates) to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------

_FIT_KEYS = ("network", "design", "data", "rep", "model", "nugget",
             "n_starts")


def _cmd_fit(args) -> int:
    if not args.config:
        raise FileFormatError("fit requires --config")
    cfg = strict_object(_load_json(args.config), _FIT_KEYS, "fit config")
    net, _ = parse_network_source(
        require_key(cfg, "network", "fit config"), default_seed=0)
    model = cfg.get("model", "T")
    if model not in MODEL_SHORTCUTS:
        raise FileFormatError(
            f"model must be one of {sorted(MODEL_SHORTCUTS)}")
    points, times = _read_design_csv(
        net, require_key(cfg, "design", "fit config"))
    y = _read_draws_column(require_key(cfg, "data", "fit config"),
                           int(cfg.get("rep", 0)))
    if y.size != len(points):
        raise FileFormatError(
            f"data column has {y.size} values for {len(points)} design rows")
    nugget = float(cfg.get("nugget", 0.1))
    n_starts = int(cfg.get("n_starts", 3))

    _gate_kernel(kernel_from_json(model), classify_topology(net),
                 args.strict, model)
    design = SpaceTimeDesign(net, points, times)
    result = fit(design, model, y, nugget=nugget, n_starts=n_starts)
    payload = {"model": model, "sigma2": result.sigma2, "c_S": result.c_S,
               "c_T": result.c_T, "loglik": result.loglik,
               "converged": result.converged,
               "iterations": result.iterations, "n_evals": result.n_evals}
    print(json.dumps(payload, indent=1))
    if args.out:
        out = _ensure_out(args)
        with open(os.path.join(out, "fit.json"), "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
        _write_run_json(out, "fit", dict(cfg), None, 1, args.strict)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sim-study
# ---------------------------------------------------------------------------

def _cmd_sim_study(args) -> int:
    if not args.config:
        raise FileFormatError("sim-study requires --config")
    cfg = study_config_from_json(_load_json(args.config))
    seed = _resolve_seed(args.seed, cfg.seed)
    cfg = cfg.with_seed(seed)
    threads = _resolve_threads(args)

    topo = classify_topology(cfg.network)
    for model in cfg.models:
        _gate_kernel(kernel_from_json(model), topo, args.strict, model)

    out = _ensure_out(args)
    _write_run_json(out, "sim-study", config_to_json(cfg), seed, threads,
                    args.strict)
    result = run_sim_study(cfg, threads=threads)
    write_replicates_csv(result, os.path.join(out, "replicates.csv"))
    write_summary_csv(result, os.path.join(out, "summary.csv"))
    for s in result.summaries:
        print(f"{s.model}: win proportion {s.win_proportion:.3f} "
              f"({s.wins}/{s.n_replicates}, {s.ties} ties)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON configuration file")
    common.add_argument("--out", metavar="DIR",
                        help="output directory for artifacts and run.json")
    common.add_argument("--seed", type=int, metavar="INT",
                        help="override/provide the run seed")
    common.add_argument("--threads", type=int, metavar="INT",
                        help="worker cap (env NETKERNEL_THREADS, default 1)")
    common.add_argument("--strict", action="store_true",
                        help="refuse kernels with an invalid verdict")

    parser = argparse.ArgumentParser(
        prog="netkernel",
        description="Space-time covariance kernels on networks: "
                    "validation, distances, audits, simulation, fitting.")
    sub = parser.add_subparsers(dest="command")

    graph = sub.add_parser("graph", help="network file operations")
    gsub = graph.add_subparsers(dest="graph_command")
    gv = gsub.add_parser("validate", parents=[common],
                         help="validate a network file")
    gv.add_argument("path", help="network JSON file")
    gv.set_defaults(handler=_cmd_graph_validate, command="graph validate")
    gi = gsub.add_parser("info", parents=[common],
                         help="summarize a network file")
    gi.add_argument("path", help="network JSON file")
    gi.set_defaults(handler=_cmd_graph_info, command="graph info")

    dist = sub.add_parser("dist", parents=[common],
                          help="distance matrix between points")
    dist.add_argument("network", help="network JSON file")
    dist.add_argument("--points", required=True, metavar="CSV",
                      help="points file (point_id,kind,ref_id,offset)")
    dist.add_argument("--metric", choices=SPATIAL_METRICS,
                      default="geodesic")
    dist.set_defaults(handler=_cmd_dist, command="dist")

    kernel = sub.add_parser("kernel", help="kernel operations")
    ksub = kernel.add_subparsers(dest="kernel_command")
    ke = ksub.add_parser("eval", parents=[common],
                         help="evaluate a kernel on a (d, u) grid")
    ke.add_argument("--spec", required=True,
                    help="kernel JSON file or shortcut name (T, C1, C2)")
    ke.add_argument("--d", type=float, nargs="+", metavar="F",
                    help="distance grid (nondecreasing; default 0)")
    ke.add_argument("--u", type=float, nargs="+", metavar="F",
                    help="time-lag grid (nondecreasing; default 0)")
    ke.set_defaults(handler=_cmd_kernel_eval, command="kernel eval")

    pd = sub.add_parser("pd", help="positive-definiteness audits")
    pdsub = pd.add_subparsers(dest="pd_command")
    pc = pdsub.add_parser("check", parents=[common],
                          help="eigenvalue audit over random designs")
    pc.add_argument("--spec", required=True,
                    help="kernel JSON file or shortcut name")
    pc.add_argument("--net", required=True, help="network JSON file")
    pc.set_defaults(handler=_cmd_pd_check, command="pd check")

    sim = sub.add_parser("simulate", parents=[common],
                         help="draw Gaussian field replicates")
    sim.set_defaults(handler=_cmd_simulate, command="simulate")

    fitp = sub.add_parser("fit", parents=[common],
                          help="maximum-likelihood fit of one model")
    fitp.set_defaults(handler=_cmd_fit, command="fit")

    study = sub.add_parser("sim-study", parents=[common],
                           help="model-comparison simulation study")
    study.set_defaults(handler=_cmd_sim_study, command="sim-study")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_help(file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return handler(args)
    except _Refusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (NetworkBuildError, InconsistentNetworkError,
            MissingCoordinatesError, MetricMismatchError,
            NotPositiveDefiniteError, SingularSystemError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NetkernelError as exc:
        # remaining package errors indicate malformed configuration
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
