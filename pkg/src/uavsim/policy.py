"""The four drone controllers and their shared decision vocabulary.

The actual stepping logic lives in `kernels` (one jitted controller switched
on the policy code); this module owns the public names: mode and policy
enums, drone parameters, the documented mode-transition graphs, and a
step-at-a-time API used by tests and by anyone poking at single transitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from . import kernels as K
from .energy import LaserLink, PowerModel, propulsion_power, vertical_power
from .world import Position, Scenario


class Policy(IntEnum):
    NONCHARGED = K.NONCHARGED
    CHARGED = K.CHARGED
    TETHERED = K.TETHERED
    LASER = K.LASER


POLICY_NAMES = {p: p.name.lower() for p in Policy}
POLICY_BY_NAME = {v: k for k, v in POLICY_NAMES.items()}


class DroneMode(IntEnum):
    TravelToCluster = K.TRAVEL_TO_CLUSTER
    Serving = K.SERVING
    TravelToStation = K.TRAVEL_TO_STATION
    Descending = K.DESCENDING
    ChargingOnPad = K.CHARGING_ON_PAD
    Ascending = K.ASCENDING
    Docking = K.DOCKING
    TetheredServing = K.TETHERED_SERVING
    Undocking = K.UNDOCKING
    EmergencyLanding = K.EMERGENCY_LANDING
    Landed = K.LANDED
    Done = K.DONE


class EventKind(IntEnum):
    cluster_served = K.EV_CLUSTER_SERVED
    charge_start = K.EV_CHARGE_START
    charge_stop = K.EV_CHARGE_STOP
    dock = K.EV_DOCK
    undock = K.EV_UNDOCK
    emergency_landing = K.EV_EMERGENCY_LANDING
    hard_landing = K.EV_HARD_LANDING
    mission_complete = K.EV_MISSION_COMPLETE


@dataclass(frozen=True)
class DroneParams:
    """Mission-level drone constants (physics constants live in PowerModel)."""

    altitude_op: float = 100.0  # m
    v_cruise: float = 6.2  # m/s, energy-optimal level speed
    v_climb: float = 2.0  # m/s, ascent/descent rate
    r_cov: float = 150.0  # m, uplink coverage radius
    uplink_rate: float = 2e7  # bits/s
    dock_time: float = 120.0  # s per dock or undock procedure
    tether_length: float = 150.0  # m
    reserve_frac: float = 0.10
    charge_resume_frac: float = 0.95
    serve_untethered: bool = True  # tethered drone may serve on battery between docks

    def __post_init__(self):
        if not (0.0 < self.reserve_frac < self.charge_resume_frac <= 1.0):
            raise ValueError("need 0 < reserve_frac < charge_resume_frac <= 1")
        for name in ("altitude_op", "v_cruise", "v_climb", "r_cov", "uplink_rate", "dock_time"):
            if getattr(self, name) <= 0:
                raise ValueError(f"DroneParams.{name} must be positive")

    @property
    def tether_play(self) -> float:
        """Horizontal reach while docked at operational altitude."""
        return math.sqrt(max(self.tether_length**2 - self.altitude_op**2, 0.0))


@dataclass
class DroneState:
    """Mutable per-step drone status."""

    position: Position
    altitude: float
    battery_j: float
    mode: DroneMode = DroneMode.TravelToCluster
    target: int | None = None  # cluster or station id, mode-dependent
    collected: float = 0.0  # bits
    odometer: float = 0.0  # meters of 3-D path
    mode_timer: float = 0.0  # seconds remaining in dock/undock procedures
    anchor_station: int | None = None  # hover-charge / dock anchor
    emergency_sent: bool = False
    hard_sent: bool = False
    complete_sent: bool = False

    def to_vector(self) -> np.ndarray:
        v = np.zeros(K.N_STATE, dtype=np.float64)
        v[K.S_X] = self.position.x
        v[K.S_Y] = self.position.y
        v[K.S_ALT] = self.altitude
        v[K.S_BATT] = self.battery_j
        v[K.S_BITS] = self.collected
        v[K.S_ODOM] = self.odometer
        v[K.S_MODE] = float(self.mode)
        v[K.S_TARGET] = -1.0 if self.target is None else float(self.target)
        v[K.S_TIMER] = self.mode_timer
        v[K.S_ANCHOR] = -1.0 if self.anchor_station is None else float(self.anchor_station)
        v[K.S_EMERG_SENT] = 1.0 if self.emergency_sent else 0.0
        v[K.S_HARD_SENT] = 1.0 if self.hard_sent else 0.0
        v[K.S_DONE_SENT] = 1.0 if self.complete_sent else 0.0
        return v

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "DroneState":
        return cls(
            position=Position(float(v[K.S_X]), float(v[K.S_Y])),
            altitude=float(v[K.S_ALT]),
            battery_j=float(v[K.S_BATT]),
            mode=DroneMode(int(v[K.S_MODE])),
            target=None if v[K.S_TARGET] < 0 else int(v[K.S_TARGET]),
            collected=float(v[K.S_BITS]),
            odometer=float(v[K.S_ODOM]),
            mode_timer=float(v[K.S_TIMER]),
            anchor_station=None if v[K.S_ANCHOR] < 0 else int(v[K.S_ANCHOR]),
            emergency_sent=v[K.S_EMERG_SENT] > 0,
            hard_sent=v[K.S_HARD_SENT] > 0,
            complete_sent=v[K.S_DONE_SENT] > 0,
        )


def nearest_unserved_cluster(state: DroneState, sc: Scenario, remaining=None):
    """Cluster with data left that minimizes ground distance; ties -> lowest id."""
    best = None
    best_d = math.inf
    for c in sc.clusters:
        left = c.data_total if remaining is None else remaining[c.id]
        if left <= 0:
            continue
        d = math.hypot(c.position.x - state.position.x, c.position.y - state.position.y)
        if d < best_d:
            best_d = d
            best = c
    return best


def required_return_energy(
    state: DroneState, dest: Position, model: PowerModel, p: DroneParams,
    capacity: float,
) -> float:
    """Energy needed to cruise to dest, descend from the current altitude,
    and still hold the configured reserve."""
    d = math.hypot(dest.x - state.position.x, dest.y - state.position.y)
    travel = propulsion_power(model, p.v_cruise) * (d / p.v_cruise)
    descent = 0.0
    if state.altitude > 0:
        descent = vertical_power(model, -p.v_climb) * (state.altitude / p.v_climb)
    return travel + descent + p.reserve_frac * capacity


# Documented legal mode transitions per policy (self-loops implied).
_COMMON_END = {
    (DroneMode.EmergencyLanding, DroneMode.Landed),
    (DroneMode.Landed, DroneMode.Done),
}
_FREE_FLIGHT = {
    (DroneMode.TravelToCluster, DroneMode.Serving),
    (DroneMode.Serving, DroneMode.TravelToCluster),
    (DroneMode.TravelToCluster, DroneMode.EmergencyLanding),
    (DroneMode.Serving, DroneMode.EmergencyLanding),
    (DroneMode.TravelToCluster, DroneMode.Done),
    (DroneMode.Serving, DroneMode.Done),
}
_DIVERT = {
    (DroneMode.TravelToCluster, DroneMode.TravelToStation),
    (DroneMode.Serving, DroneMode.TravelToStation),
    (DroneMode.TravelToStation, DroneMode.EmergencyLanding),
}

LEGAL_TRANSITIONS: dict[Policy, set] = {
    Policy.NONCHARGED: _FREE_FLIGHT | _COMMON_END,
    Policy.CHARGED: _FREE_FLIGHT | _COMMON_END | _DIVERT | {
        (DroneMode.TravelToStation, DroneMode.Descending),
        (DroneMode.Descending, DroneMode.ChargingOnPad),
        (DroneMode.ChargingOnPad, DroneMode.Ascending),
        (DroneMode.Ascending, DroneMode.TravelToCluster),
        (DroneMode.Ascending, DroneMode.Serving),
        (DroneMode.Ascending, DroneMode.TravelToStation),
    },
    Policy.LASER: _FREE_FLIGHT | _COMMON_END | _DIVERT | {
        (DroneMode.TravelToStation, DroneMode.ChargingOnPad),
        (DroneMode.ChargingOnPad, DroneMode.Serving),
        (DroneMode.Serving, DroneMode.ChargingOnPad),
        (DroneMode.ChargingOnPad, DroneMode.TravelToCluster),
    },
    Policy.TETHERED: _FREE_FLIGHT | _COMMON_END | _DIVERT | {
        (DroneMode.TravelToStation, DroneMode.TravelToCluster),
        (DroneMode.TravelToStation, DroneMode.Serving),
        (DroneMode.TravelToStation, DroneMode.Docking),
        (DroneMode.TravelToStation, DroneMode.Done),
        (DroneMode.Docking, DroneMode.TetheredServing),
        (DroneMode.TetheredServing, DroneMode.Undocking),
        (DroneMode.TetheredServing, DroneMode.Done),
        (DroneMode.Undocking, DroneMode.TravelToCluster),
        (DroneMode.Undocking, DroneMode.TravelToStation),
        (DroneMode.Undocking, DroneMode.Serving),
        (DroneMode.Undocking, DroneMode.EmergencyLanding),
    },
}


@dataclass(frozen=True)
class StepEvent:
    t: float
    kind: EventKind
    id: int | None
    value: float


def build_param_vector(
    params: DroneParams,
    model: PowerModel,
    link: LaserLink,
    capacity: float,
    dt: float,
    charge_power: float,
    breakeven_ground: float,
    start: Position,
) -> np.ndarray:
    prm = np.zeros(K.N_PRM, dtype=np.float64)
    prm[K.P_DT] = dt
    prm[K.P_ALT_OP] = params.altitude_op
    prm[K.P_V_CRUISE] = params.v_cruise
    prm[K.P_V_CLIMB] = params.v_climb
    prm[K.P_R_COV] = params.r_cov
    prm[K.P_RATE] = params.uplink_rate
    prm[K.P_DOCK_TIME] = params.dock_time
    prm[K.P_TETHER_LEN] = params.tether_length
    prm[K.P_RESERVE] = params.reserve_frac
    prm[K.P_RESUME] = params.charge_resume_frac
    prm[K.P_CAP] = capacity
    prm[K.P_P_BLADE] = model.p_blade
    prm[K.P_P_IND] = model.p_induced
    prm[K.P_TIP] = model.tip_speed
    prm[K.P_V0] = model.v_induced_hover
    prm[K.P_DRAG] = model.drag_coeff
    prm[K.P_MASS] = model.mass_total
    prm[K.P_GRAV] = model.gravity
    prm[K.P_CHARGE_W] = charge_power
    prm[K.P_L_SRC] = link.source_power
    prm[K.P_L_EFF] = link.conversion_eff
    prm[K.P_L_R0] = link.beam_radius_0
    prm[K.P_L_DIV] = link.divergence
    prm[K.P_L_RX] = link.receiver_radius
    prm[K.P_L_EXT] = link.extinction
    prm[K.P_BREAKEVEN_G] = breakeven_ground
    prm[K.P_SERVE_UNTETHERED] = 1.0 if params.serve_untethered else 0.0
    prm[K.P_X0] = start.x
    prm[K.P_Y0] = start.y
    return prm


def step(
    policy: Policy,
    state: DroneState,
    sc: Scenario,
    params: DroneParams,
    model: PowerModel,
    link: LaserLink,
    capacity: float,
    dt: float,
    remaining: np.ndarray,
    t: float = 0.0,
    breakeven_ground: float | None = None,
) -> tuple[DroneState, list[StepEvent]]:
    """Advance one step of the given policy; mutates `remaining` in place."""
    from .engine import breakeven_ground_radius  # local import, no cycle at module load

    if breakeven_ground is None:
        breakeven_ground = breakeven_ground_radius(link, model, params)
    prm = build_param_vector(
        params, model, link, capacity, dt, 300.0, breakeven_ground, state.position
    )
    vec = state.to_vector()
    ev = np.empty((16, K.EV_COLS), dtype=np.float64)
    n_ev, _upl = K._step(
        int(policy), t + dt, vec, remaining, sc.cluster_xy(), sc.station_xy(), prm, ev, 0
    )
    events = [
        StepEvent(
            t=float(ev[i, 0]),
            kind=EventKind(int(ev[i, 1])),
            id=None if ev[i, 2] < 0 else int(ev[i, 2]),
            value=float(ev[i, 3]),
        )
        for i in range(n_ev)
    ]
    return DroneState.from_vector(vec), events


def step_noncharged(state, sc, params, model, link, capacity, dt, remaining, **kw):
    return step(Policy.NONCHARGED, state, sc, params, model, link, capacity, dt, remaining, **kw)


def step_charged(state, sc, params, model, link, capacity, dt, remaining, **kw):
    return step(Policy.CHARGED, state, sc, params, model, link, capacity, dt, remaining, **kw)


def step_tethered(state, sc, params, model, link, capacity, dt, remaining, **kw):
    return step(Policy.TETHERED, state, sc, params, model, link, capacity, dt, remaining, **kw)


def step_laser(state, sc, params, model, link, capacity, dt, remaining, **kw):
    return step(Policy.LASER, state, sc, params, model, link, capacity, dt, remaining, **kw)
