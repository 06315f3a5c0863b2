"""Time-stepped episode runner and trace handling.

`run_episode` advances one drone under one policy through one scenario for a
bounded mission window at fixed dt, recording per-step records and discrete
events. `run_paired_trial` runs all requested policies against the identical
scenario. Everything here is deterministic in its inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .energy import (
    DEFAULT_CAPACITY_J,
    STATION_CHARGE_W,
    LaserLink,
    PowerModel,
    laser_breakeven_range,
    laser_harvest_power_s,
    propulsion_power_s,
    vertical_power_s,
)
from .policy import DroneMode, DroneParams, EventKind, Policy, build_param_vector
from .world import Position, Scenario


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1.0  # s
    time_window: float = 9000.0  # s
    trace_stride: int = 1  # 0 disables per-step records (events still kept)
    battery_capacity: float = DEFAULT_CAPACITY_J
    charge_power: float = STATION_CHARGE_W
    start: Position | None = None  # default: area center

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.time_window < self.dt:
            raise ValueError("time_window must be >= dt")


@dataclass(frozen=True)
class TraceEvent:
    t: float
    kind: str
    id: int | None
    value: float


@dataclass
class Trace:
    """Per-step records plus discrete events for one episode."""

    policy: Policy
    records: np.ndarray  # (n, 8): t, x, y, alt, battery_j, bits, mode, uplink id
    events: list[TraceEvent]
    final_state: np.ndarray  # kernel state vector at mission end
    n_clusters: int
    scenario_hash: str
    dt: float
    time_window: float

    @property
    def t_end(self) -> float:
        return float(self.records[-1, 0]) if len(self.records) else 0.0

    @property
    def collected_bits(self) -> float:
        return float(self.final_state[K.S_BITS])

    @property
    def odometer_m(self) -> float:
        return float(self.final_state[K.S_ODOM])

    @property
    def battery_j(self) -> float:
        return float(self.final_state[K.S_BATT])

    def clusters_served(self) -> int:
        return sum(1 for e in self.events if e.kind == "cluster_served")

    def served_order(self) -> list[int]:
        """Cluster ids in the order they were fully served."""
        return [e.id for e in self.events if e.kind == "cluster_served"]

    def odometer_at_serves(self) -> list[float]:
        """Odometer reading at each cluster_served event, in serve order."""
        return [e.value for e in self.events if e.kind == "cluster_served"]

    @property
    def ended_by(self) -> str:
        kinds = {e.kind for e in self.events}
        if "mission_complete" in kinds:
            return "complete"
        if "emergency_landing" in kinds:
            return "emergency"
        return "window"

    def to_jsonl(self) -> str:
        """One record per line, event lines interleaved at their timestamps."""
        lines = []
        ev_idx = 0
        events = self.events
        for row in self.records:
            t = float(row[0])
            while ev_idx < len(events) and events[ev_idx].t <= t:
                lines.append(_event_json(events[ev_idx]))
                ev_idx += 1
            lines.append(json.dumps({
                "t": t, "x": float(row[1]), "y": float(row[2]), "alt": float(row[3]),
                "battery_j": float(row[4]), "bits": float(row[5]),
                "mode": DroneMode(int(row[6])).name,
            }))
        while ev_idx < len(events):
            lines.append(_event_json(events[ev_idx]))
            ev_idx += 1
        return "\n".join(lines) + "\n"


def _event_json(e: TraceEvent) -> str:
    doc = {"t": e.t, "event": e.kind}
    if e.id is not None:
        doc["id"] = e.id
    if e.kind == "cluster_served":
        doc["odometer_m"] = e.value
    return json.dumps(doc)


def breakeven_ground_radius(
    link: LaserLink, model: PowerModel, params: DroneParams
) -> float:
    """Ground radius of the laser break-even disc at operational altitude.

    Returns -1.0 when no break-even exists or the disc does not reach the
    drone's operating altitude.
    """
    d = laser_breakeven_range(link, model)
    if d is None or d < params.altitude_op:
        return -1.0
    return math.sqrt(d * d - params.altitude_op * params.altitude_op)


def run_episode(
    sc: Scenario,
    policy: Policy,
    params: DroneParams | None = None,
    model: PowerModel | None = None,
    link: LaserLink | None = None,
    cfg: SimConfig | None = None,
    n_stations: int | None = None,
) -> Trace:
    """Run one mission to Done or to the end of the time window."""
    params = params or DroneParams()
    model = model or PowerModel()
    link = link or LaserLink()
    cfg = cfg or SimConfig()

    start = cfg.start or Position(sc.area_side / 2.0, sc.area_side / 2.0)
    beg = breakeven_ground_radius(link, model, params)
    prm = build_param_vector(
        params, model, link, cfg.battery_capacity, cfg.dt, cfg.charge_power, beg, start
    )
    n_steps = int(math.floor(cfg.time_window / cfg.dt + 1e-9))

    cl_xy = sc.cluster_xy()
    cl_bits = sc.cluster_bits()
    st_xy = sc.station_xy(n_stations)

    n_rec_max = n_steps + 2 if cfg.trace_stride > 0 else 1
    rec = np.empty((n_rec_max, K.REC_COLS), dtype=np.float64)
    ev = np.empty((2 * n_steps + len(cl_bits) + 16, K.EV_COLS), dtype=np.float64)
    state = np.empty(K.N_STATE, dtype=np.float64)

    n_rec, n_ev = K._episode(
        int(policy), n_steps, int(cfg.trace_stride), cl_xy, cl_bits, st_xy, prm,
        rec, ev, state,
    )

    events = [
        TraceEvent(
            t=float(ev[i, 0]),
            kind=EventKind(int(ev[i, 1])).name,
            id=None if ev[i, 2] < 0 else int(ev[i, 2]),
            value=float(ev[i, 3]),
        )
        for i in range(n_ev)
    ]
    trace = Trace(
        policy=policy,
        records=rec[:n_rec].copy(),
        events=events,
        final_state=state,
        n_clusters=len(cl_bits),
        scenario_hash=sc.content_hash(),
        dt=cfg.dt,
        time_window=cfg.time_window,
    )
    _check_trace_invariants(trace, params)
    return trace


def _check_trace_invariants(trace: Trace, params: DroneParams) -> None:
    """Cheap universal postconditions; violation means a simulator bug."""
    rec = trace.records
    if len(rec) == 0:
        raise AssertionError("empty trace")
    t = rec[:, 0]
    if np.any(np.diff(t) <= 0):
        raise AssertionError("trace times not strictly increasing")
    if t[-1] > trace.time_window + 1e-9:
        raise AssertionError("trace time exceeds the mission window")
    if np.any(rec[:, 4] < -1e-9):
        raise AssertionError("negative battery recorded")
    served = trace.served_order()
    if len(served) != len(set(served)):
        raise AssertionError("cluster served more than once")


def run_paired_trial(
    seed: int,
    scenario: Scenario,
    policies: list[Policy],
    params: DroneParams | None = None,
    model: PowerModel | None = None,
    link: LaserLink | None = None,
    cfg: SimConfig | None = None,
    n_stations: int | None = None,
) -> dict[Policy, Trace]:
    """Run every policy against the identical scenario (paired comparison)."""
    out = {}
    for pol in policies:
        out[pol] = run_episode(scenario, pol, params, model, link, cfg, n_stations)
    return out


# --- trace replay (independent battery re-integration for tests) -----------


def replay_battery(
    trace: Trace,
    sc: Scenario,
    policy: Policy,
    params: DroneParams,
    model: PowerModel,
    link: LaserLink,
    cfg: SimConfig,
    n_stations: int | None = None,
) -> np.ndarray:
    """Re-integrate the battery series from recorded modes and positions.

    Uses only the documented mode -> power mapping, the recorded kinematics,
    and the charge/harvest rules; requires trace_stride == 1.
    """
    rec = trace.records
    st_xy = sc.station_xy(n_stations)
    hover = model.hover_power
    cap = cfg.battery_capacity
    e = np.empty(len(rec))
    e[0] = rec[0, 4]
    for i in range(1, len(rec)):
        dt = rec[i, 0] - rec[i - 1, 0]
        mode = DroneMode(int(rec[i, 6]))
        hdist = math.hypot(rec[i, 1] - rec[i - 1, 1], rec[i, 2] - rec[i - 1, 2])
        dalt = rec[i, 3] - rec[i - 1, 3]
        if mode in (DroneMode.TravelToCluster, DroneMode.TravelToStation):
            cons = propulsion_power_s(
                hdist / dt, model.p_blade, model.p_induced, model.tip_speed,
                model.v_induced_hover, model.drag_coeff,
            )
        elif mode == DroneMode.Serving:
            cons = hover
        elif mode in (DroneMode.Descending, DroneMode.Ascending, DroneMode.EmergencyLanding):
            cons = vertical_power_s(dalt / dt, hover, model.mass_total, model.gravity)
        elif mode in (DroneMode.Docking, DroneMode.Undocking):
            cons = hover
        elif mode == DroneMode.ChargingOnPad:
            cons = hover if policy == Policy.LASER else 0.0
        else:  # TetheredServing, Landed, Done
            cons = 0.0

        harv = 0.0
        if policy == Policy.LASER and len(st_xy) and mode not in (DroneMode.Landed, DroneMode.Done):
            for s in st_xy:
                slant = math.sqrt(
                    (s[0] - rec[i, 1]) ** 2 + (s[1] - rec[i, 2]) ** 2 + rec[i, 3] ** 2
                )
                harv = max(harv, laser_harvest_power_s(
                    slant, link.source_power, link.conversion_eff, link.beam_radius_0,
                    link.divergence, link.receiver_radius, link.extinction,
                ))
        elif policy == Policy.CHARGED and mode == DroneMode.ChargingOnPad:
            harv = cfg.charge_power
        elif policy == Policy.TETHERED and mode == DroneMode.TetheredServing:
            harv = cfg.charge_power
        if mode in (DroneMode.Landed, DroneMode.Done):
            e[i] = e[i - 1]
        else:
            e[i] = min(max(e[i - 1] + (harv - cons) * dt, 0.0), cap)
    return e
