"""Model-comparison simulation study on a network.

Data are generated from the space-time kernel ``model_T`` (geodesic
metric) at sampled network sites, then refitted under each candidate
model by maximum likelihood.  Per replicate the winner is the model with
the highest log-likelihood; across replicates we aggregate win
proportions and parameter-recovery errors (MAE and RMSE against the
generating values).

Replicate ``r`` derives all of its randomness from
``default_rng([seed, 1, r])`` (time stamps first, then the Gaussian
draw), so results are byte-identical for any thread count.  Site
locations are sampled once with the base seed and shared by every
replicate; time stamps are resampled per replicate unless
``fix_times`` is set, in which case they come from
``default_rng([seed, 0, 0])``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import FileFormatError, InvalidParamsError
from .gp import SpaceTimeDesign, _chol_lower, covariance_matrix, fit
from .kernels import MODEL_SHORTCUTS, model_T
from .network import (GENERATOR_KINDS, Network, generate, load_network,
                      sample_points)

#: log-likelihood gap treated as a tie between two fitted models
TIE_TOL = 1e-9

PARAM_NAMES = ("sigma2", "c_S", "c_T")


@dataclass(frozen=True)
class TrueParams:
    sigma2: float
    c_S: float
    c_T: float
    nugget: float

    def __post_init__(self):
        for name in ("sigma2", "c_S", "c_T"):
            if getattr(self, name) <= 0:
                raise InvalidParamsError(f"true {name} must be positive")
        if self.nugget < 0:
            raise InvalidParamsError("true nugget must be nonnegative")


@dataclass(frozen=True)
class StudyConfig:
    """Fully resolved study description.  ``network`` is either a loaded
    Network or a (kind, params, seed) generation recipe kept for the run
    log."""

    network: Network
    n_sites: int
    times_per_site: int
    true_params: TrueParams
    n_replicates: int
    models: Tuple[str, ...]
    seed: Optional[int]
    fix_times: bool = False
    n_starts: int = 1
    network_recipe: Optional[dict] = None

    def __post_init__(self):
        if self.n_sites < 2:
            raise InvalidParamsError("n_sites must be >= 2")
        if self.times_per_site < 1:
            raise InvalidParamsError("times_per_site must be >= 1")
        if self.n_replicates < 1:
            raise InvalidParamsError("n_replicates must be >= 1")
        if not self.models:
            raise InvalidParamsError("models must be nonempty")
        seen = set()
        for m in self.models:
            if m not in MODEL_SHORTCUTS:
                raise InvalidParamsError(
                    f"unknown model {m!r}; choose from "
                    f"{sorted(MODEL_SHORTCUTS)}")
            if m in seen:
                raise InvalidParamsError(f"duplicate model {m!r}")
            seen.add(m)
        if self.n_starts < 1:
            raise InvalidParamsError("n_starts must be >= 1")

    def with_seed(self, seed: int) -> "StudyConfig":
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class ReplicateRecord:
    """One fitted model on one replicate."""

    replicate: int
    model: str
    loglik: float
    sigma2: float
    c_S: float
    c_T: float
    converged: bool
    iterations: int
    winner: bool
    tie: bool


@dataclass(frozen=True)
class ModelSummary:
    """Aggregates for one model across all replicates."""

    model: str
    n_replicates: int
    wins: int
    win_proportion: float
    ties: int
    mae: Dict[str, float]
    rmse: Dict[str, float]


@dataclass(frozen=True)
class StudyResult:
    config: StudyConfig
    records: Tuple[ReplicateRecord, ...]
    summaries: Tuple[ModelSummary, ...]

    def summary_for(self, model: str) -> ModelSummary:
        for s in self.summaries:
            if s.model == model:
                return s
        raise KeyError(model)

    def win_proportion(self, model: str) -> float:
        return self.summary_for(model).win_proportion

    def estimates(self, model: str, param: str) -> np.ndarray:
        if param not in PARAM_NAMES:
            raise KeyError(param)
        return np.array([getattr(r, param) for r in self.records
                         if r.model == model])


def strict_object(obj, allowed, context):
    """Require ``obj`` to be a JSON object using only ``allowed`` keys
    (strict parsing: unknown keys are errors, not warnings)."""
    if not isinstance(obj, dict):
        raise FileFormatError(f"{context} must be a JSON object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise FileFormatError(f"unknown key(s) {unknown} in {context}")
    return obj


def require_key(obj, key, context):
    if key not in obj:
        raise FileFormatError(f"missing key {key!r} in {context}")
    return obj[key]


def parse_network_source(obj, default_seed) -> Tuple[Network, Optional[dict]]:
    """Resolve a {"generate": ...} or {"file": ...} network source into a
    Network plus the replayable recipe recorded in run logs."""
    strict_object(obj, ("generate", "file"), "network")
    if ("generate" in obj) == ("file" in obj):
        raise FileFormatError(
            "network needs exactly one of 'generate' or 'file'")
    if "file" in obj:
        return load_network(obj["file"]), {"file": obj["file"]}
    gen = strict_object(obj["generate"], ("kind", "params", "seed"),
                         "network.generate")
    kind = require_key(gen, "kind", "network.generate")
    if kind not in GENERATOR_KINDS:
        raise FileFormatError(
            f"unknown generator kind {kind!r}; choose from "
            f"{sorted(GENERATOR_KINDS)}")
    params = gen.get("params", {})
    if not isinstance(params, dict):
        raise FileFormatError("network.generate.params must be an object")
    seed = gen.get("seed", default_seed)
    recipe = {"generate": {"kind": kind, "params": dict(params),
                           "seed": seed}}
    return generate(kind, params, seed=seed), recipe


_CONFIG_KEYS = ("network", "n_sites", "times_per_site", "true",
                "n_replicates", "models", "seed", "fix_times", "n_starts")


def study_config_from_json(obj) -> StudyConfig:
    """Parse a study configuration object (strict: unknown keys are
    errors).  ``seed`` may be omitted and supplied later."""
    strict_object(obj, _CONFIG_KEYS, "study config")
    seed = obj.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise FileFormatError("seed must be an integer")
    net, recipe = parse_network_source(require_key(obj, "network", "study config"),
                                 default_seed=seed if seed is not None else 0)
    true_obj = strict_object(require_key(obj, "true", "study config"),
                              ("sigma2", "c_S", "c_T", "nugget"), "true")
    try:
        true_params = TrueParams(
            sigma2=float(require_key(true_obj, "sigma2", "true")),
            c_S=float(require_key(true_obj, "c_S", "true")),
            c_T=float(require_key(true_obj, "c_T", "true")),
            nugget=float(true_obj.get("nugget", 0.0)))
        models = obj.get("models", ["T", "C1", "C2"])
        if not isinstance(models, (list, tuple)):
            raise FileFormatError("models must be a list")
        return StudyConfig(
            network=net,
            n_sites=int(require_key(obj, "n_sites", "study config")),
            times_per_site=int(require_key(obj, "times_per_site",
                                           "study config")),
            true_params=true_params,
            n_replicates=int(require_key(obj, "n_replicates", "study config")),
            models=tuple(models),
            seed=seed,
            fix_times=bool(obj.get("fix_times", False)),
            n_starts=int(obj.get("n_starts", 1)),
            network_recipe=recipe)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"bad value in study config: {exc}") from exc


def load_study_config(path) -> StudyConfig:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path} is not valid JSON: {exc}") from exc
    return study_config_from_json(obj)


def config_to_json(cfg: StudyConfig) -> dict:
    """Resolved-config object for the run log."""
    return {
        "network": cfg.network_recipe or {
            "generate": {"kind": "unknown", "params": {}, "seed": cfg.seed}},
        "n_sites": cfg.n_sites,
        "times_per_site": cfg.times_per_site,
        "true": {"sigma2": cfg.true_params.sigma2,
                 "c_S": cfg.true_params.c_S,
                 "c_T": cfg.true_params.c_T,
                 "nugget": cfg.true_params.nugget},
        "n_replicates": cfg.n_replicates,
        "models": list(cfg.models),
        "seed": cfg.seed,
        "fix_times": cfg.fix_times,
        "n_starts": cfg.n_starts,
    }


def _replicate_records(cfg: StudyConfig, sites, fixed_times, r: int):
    n = cfg.n_sites * cfg.times_per_site
    rng = np.random.default_rng([cfg.seed, 1, r])
    times = fixed_times if fixed_times is not None else rng.random(n)
    design = SpaceTimeDesign(cfg.network, sites, times)
    truth = model_T(cfg.true_params.sigma2, cfg.true_params.c_S,
                    cfg.true_params.c_T)
    chol = _chol_lower(covariance_matrix(design, truth,
                                         cfg.true_params.nugget))
    y = chol @ rng.standard_normal(n)

    fits = {m: fit(design, m, y, nugget=cfg.true_params.nugget,
                   n_starts=cfg.n_starts) for m in cfg.models}
    best_ll = max(f.loglik for f in fits.values())
    top = [m for m in cfg.models if fits[m].loglik >= best_ll - TIE_TOL]
    winner = top[0]
    is_tie = len(top) > 1

    records = []
    for m in cfg.models:
        f = fits[m]
        records.append(ReplicateRecord(
            replicate=r, model=m, loglik=f.loglik, sigma2=f.sigma2,
            c_S=f.c_S, c_T=f.c_T, converged=f.converged,
            iterations=f.iterations, winner=(m == winner),
            tie=(is_tie and m in top)))
    return records


def _summarize(cfg: StudyConfig,
               records: Sequence[ReplicateRecord]) -> Tuple[ModelSummary, ...]:
    truth = {"sigma2": cfg.true_params.sigma2, "c_S": cfg.true_params.c_S,
             "c_T": cfg.true_params.c_T}
    out = []
    for m in cfg.models:
        rows = [r for r in records if r.model == m]
        wins = sum(r.winner for r in rows)
        ties = sum(r.tie for r in rows)
        mae = {}
        rmse = {}
        for p in PARAM_NAMES:
            err = np.array([getattr(r, p) for r in rows]) - truth[p]
            mae[p] = float(np.mean(np.abs(err)))
            rmse[p] = float(np.sqrt(np.mean(err ** 2)))
        out.append(ModelSummary(
            model=m, n_replicates=len(rows), wins=wins,
            win_proportion=wins / max(len(rows), 1), ties=ties,
            mae=mae, rmse=rmse))
    return tuple(out)


def run_sim_study(cfg: StudyConfig, threads: int = 1) -> StudyResult:
    """Run the full study.  ``threads`` only parallelizes independent
    replicates; output is identical for any value."""
    if cfg.seed is None:
        raise InvalidParamsError("study seed is unresolved; use with_seed()")
    if threads < 1:
        raise InvalidParamsError("threads must be >= 1")

    base_sites = sample_points(cfg.network, cfg.n_sites, seed=cfg.seed)
    sites = tuple(p for p in base_sites
                  for _ in range(cfg.times_per_site))
    fixed_times = None
    if cfg.fix_times:
        fixed_times = np.random.default_rng([cfg.seed, 0, 0]).random(
            cfg.n_sites * cfg.times_per_site)

    # warm the distance cache in this thread so workers only read
    probe = SpaceTimeDesign(cfg.network, sites,
                            np.zeros(len(sites)))
    for m in cfg.models:
        metric = "euclidean" if m == "C1" else "geodesic"
        probe.distances(metric)
    probe.distances("geodesic")

    def one(r: int):
        return _replicate_records(cfg, sites, fixed_times, r)

    if threads == 1:
        chunks = [one(r) for r in range(cfg.n_replicates)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(one, range(cfg.n_replicates)))

    records = tuple(rec for chunk in chunks for rec in chunk)
    return StudyResult(config=cfg, records=records,
                       summaries=_summarize(cfg, records))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


REPLICATES_HEADER = ("replicate,model,loglik,sigma2_hat,c_S_hat,c_T_hat,"
                     "converged,iterations,winner,tie")
SUMMARY_HEADER = ("model,n_replicates,wins,win_proportion,ties,"
                  "mae_sigma2,mae_c_S,mae_c_T,"
                  "rmse_sigma2,rmse_c_S,rmse_c_T")


def write_replicates_csv(result: StudyResult, path) -> None:
    with open(path, "w") as fh:
        fh.write(REPLICATES_HEADER + "\n")
        for r in result.records:
            fh.write(",".join(_fmt(v) for v in (
                r.replicate, r.model, r.loglik, r.sigma2, r.c_S, r.c_T,
                r.converged, r.iterations, r.winner, r.tie)) + "\n")


def write_summary_csv(result: StudyResult, path) -> None:
    with open(path, "w") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for s in result.summaries:
            fields = [s.model, s.n_replicates, s.wins, s.win_proportion,
                      s.ties]
            fields += [s.mae[p] for p in PARAM_NAMES]
            fields += [s.rmse[p] for p in PARAM_NAMES]
            fh.write(",".join(_fmt(v) for v in fields) + "\n")
