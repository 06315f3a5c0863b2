"""Performance metrics and the paired-seed Monte Carlo harness.

Efficiency is the fraction of clusters fully served; partial uplink earns no
efficiency credit but the bits still count in `collected`. Trials are seeded
base_seed + i and every policy (and every sweep point) of a trial consumes
the identical scenario, so comparisons are paired. Aggregation reduces in
trial-index order, which makes results independent of worker scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .energy import LaserLink, PowerModel
from .engine import SimConfig, Trace, run_episode
from .policy import DroneParams, Policy
from .world import Scenario, generate_scenario

Z95 = 1.96  # normal-approximation 95% CI


@dataclass(frozen=True)
class EpisodeMetrics:
    efficiency: float
    distance_total: float  # m
    clusters_served: int
    collected: float  # bits
    ended_by: str  # window | complete | emergency


@dataclass(frozen=True)
class AggregateStats:
    policy: str
    sweep_kind: str  # none | stations | window
    sweep_value: float | None
    trials: int
    eff_mean: float
    eff_ci: float
    dist_mean_m: float
    dist_ci_m: float
    bits_mean: float
    bits_ci: float
    served_mean: float


@dataclass(frozen=True)
class MovementPoint:
    policy: str
    n_served: int
    dist_mean_m: float
    dist_ci_m: float
    trials: int


@dataclass(frozen=True)
class WorldConfig:
    area_side: float = 5000.0  # m (25 km^2)
    n_clusters: int = 18
    n_stations: int = 6
    data_min: float = 1.0e9  # bits per cluster
    data_max: float = 3.0e9


def harvesting_efficiency(trace: Trace, sc: Scenario) -> float:
    """Fully served clusters over total; defined as 1.0 for an empty world."""
    if sc.n_clusters == 0:
        return 1.0
    return trace.clusters_served() / sc.n_clusters


def episode_metrics(trace: Trace, sc: Scenario) -> EpisodeMetrics:
    return EpisodeMetrics(
        efficiency=harvesting_efficiency(trace, sc),
        distance_total=trace.odometer_m,
        clusters_served=trace.clusters_served(),
        collected=trace.collected_bits,
        ended_by=trace.ended_by,
    )


def time_profiles(trace: Trace) -> tuple[np.ndarray, np.ndarray]:
    """(t, battery_j) and (t, collected_bits) series from the records."""
    rec = trace.records
    battery = np.column_stack([rec[:, 0], rec[:, 4]])
    bits = np.column_stack([rec[:, 0], rec[:, 5]])
    return battery, bits


def movement_efficiency(traces: list[Trace]) -> list[tuple[int, float]]:
    """Mean odometer at the n-th serve, for each served-count achieved."""
    by_n: dict[int, list[float]] = {}
    for tr in traces:
        for n, odo in enumerate(tr.odometer_at_serves(), start=1):
            by_n.setdefault(n, []).append(odo)
    return [(n, float(np.mean(v))) for n, v in sorted(by_n.items())]


def _mean_ci(values: np.ndarray) -> tuple[float, float]:
    m = float(np.mean(values))
    if len(values) < 2:
        return m, 0.0
    return m, Z95 * float(np.std(values, ddof=1)) / math.sqrt(len(values))


@dataclass(frozen=True)
class _TrialJob:
    seed: int
    world: WorldConfig
    params: DroneParams
    model: PowerModel
    link: LaserLink
    cfg: SimConfig
    policies: tuple[int, ...]
    sweep_kind: str
    sweep_values: tuple[float, ...]


def _run_trial(job: _TrialJob):
    """One paired trial: every policy at every sweep point, one scenario."""
    n_st = job.world.n_stations
    if job.sweep_kind == "stations":
        n_st = int(max(job.sweep_values))
    sc = generate_scenario(
        job.seed, job.world.area_side, job.world.n_clusters, n_st,
        (job.world.data_min, job.world.data_max),
    )
    mc_cfg = replace(job.cfg, trace_stride=0)
    out = []
    for sv in job.sweep_values:
        if job.sweep_kind == "stations":
            kw = {"n_stations": int(sv)}
            cfg = mc_cfg
        elif job.sweep_kind == "window":
            kw = {}
            cfg = replace(mc_cfg, time_window=float(sv))
        else:
            kw = {}
            cfg = mc_cfg
        for pol in job.policies:
            tr = run_episode(sc, Policy(pol), job.params, job.model, job.link, cfg, **kw)
            out.append((
                sv, pol, tr.clusters_served(), tr.odometer_m, tr.collected_bits,
                tr.ended_by, tuple(tr.odometer_at_serves()),
            ))
    return job.seed, sc.cluster_hash(), out


def run_monte_carlo(
    n_trials: int,
    base_seed: int,
    world: WorldConfig | None = None,
    params: DroneParams | None = None,
    model: PowerModel | None = None,
    link: LaserLink | None = None,
    cfg: SimConfig | None = None,
    policies: list[Policy] | None = None,
    sweep: tuple[str, list[float]] | None = None,
    workers: int | None = None,
) -> tuple[list[AggregateStats], list[MovementPoint]]:
    """Paired Monte Carlo over n_trials seeds; returns summary rows and, for
    non-sweep runs, the movement-efficiency curve points."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    world = world or WorldConfig()
    params = params or DroneParams()
    model = model or PowerModel()
    link = link or LaserLink()
    cfg = cfg or SimConfig()
    policies = policies or list(Policy)

    sweep_kind = "none"
    sweep_values: tuple[float, ...] = (0.0,)
    if sweep is not None:
        sweep_kind, vals = sweep
        if sweep_kind not in ("stations", "window"):
            raise ValueError(f"unknown sweep kind {sweep_kind!r}")
        sweep_values = tuple(float(v) for v in vals)

    jobs = [
        _TrialJob(
            seed=base_seed + i, world=world, params=params, model=model, link=link,
            cfg=cfg, policies=tuple(int(p) for p in policies),
            sweep_kind=sweep_kind, sweep_values=sweep_values,
        )
        for i in range(n_trials)
    ]

    if workers is None:
        workers = int(os.environ.get("UAVSIM_THREADS", "1"))
    results = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for seed, chash, rows in ex.map(_run_trial, jobs, chunksize=8):
                results[seed] = (chash, rows)
    else:
        for job in jobs:
            seed, chash, rows = _run_trial(job)
            results[seed] = (chash, rows)

    # ordered reduction by trial index; verify pairing while at it
    cluster_hashes = set()
    per_key: dict[tuple[float, int], dict[str, list]] = {}
    movement: dict[tuple[int, int], list[float]] = {}
    for i in range(n_trials):
        chash, rows = results[base_seed + i]
        cluster_hashes.add((base_seed + i, chash))
        for sv, pol, served, dist, bits, ended, odos in rows:
            d = per_key.setdefault((sv, pol), {"served": [], "dist": [], "bits": []})
            d["served"].append(served)
            d["dist"].append(dist)
            d["bits"].append(bits)
            if sweep_kind == "none":
                for n, odo in enumerate(odos, start=1):
                    movement.setdefault((pol, n), []).append(odo)
    if len(cluster_hashes) != n_trials:
        raise AssertionError("pairing violated: scenario hash mismatch across a trial")

    n_c = world.n_clusters
    stats = []
    for sv in sweep_values:
        for pol in policies:
            d = per_key[(sv, int(pol))]
            served = np.array(d["served"], dtype=float)
            eff = served / n_c if n_c > 0 else np.ones_like(served)
            eff_m, eff_c = _mean_ci(eff)
            dist_m, dist_c = _mean_ci(np.array(d["dist"]))
            bits_m, bits_c = _mean_ci(np.array(d["bits"]))
            stats.append(AggregateStats(
                policy=pol.name.lower(),
                sweep_kind=sweep_kind,
                sweep_value=None if sweep_kind == "none" else sv,
                trials=n_trials,
                eff_mean=eff_m, eff_ci=eff_c,
                dist_mean_m=dist_m, dist_ci_m=dist_c,
                bits_mean=bits_m, bits_ci=bits_c,
                served_mean=float(np.mean(served)),
            ))

    curve = []
    for (pol, n), odos in sorted(movement.items()):
        arr = np.array(odos)
        m, c = _mean_ci(arr)
        curve.append(MovementPoint(
            policy=Policy(pol).name.lower(), n_served=n,
            dist_mean_m=m, dist_ci_m=c, trials=len(arr),
        ))
    return stats, curve


SUMMARY_COLUMNS = [
    "policy", "sweep_kind", "sweep_value", "trials", "eff_mean", "eff_ci",
    "dist_mean_m", "dist_ci_m", "bits_mean", "bits_ci", "served_mean",
]

MOVEMENT_COLUMNS = ["policy", "n_served", "dist_mean_m", "dist_ci_m", "trials"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def summary_csv(stats: list[AggregateStats]) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for s in stats:
        lines.append(",".join(_fmt(getattr(s, c)) for c in SUMMARY_COLUMNS))
    return "\n".join(lines) + "\n"


def movement_csv(points: list[MovementPoint]) -> str:
    lines = [",".join(MOVEMENT_COLUMNS)]
    for p in points:
        lines.append(",".join(_fmt(getattr(p, c)) for c in MOVEMENT_COLUMNS))
    return "\n".join(lines) + "\n"
