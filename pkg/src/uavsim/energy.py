"""Power and energy physics.

Rotary-wing propulsion power vs. velocity, climb/descent power, battery
integration with clamping, constant-power station charging, and the
distance-dependent laser harvest model. The scalar cores (`*_s` functions)
are shared with the jitted mission kernel; the dataclass API wraps them.

Units: watts, joules, meters, seconds throughout. Double precision only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Battery: 4S LiPo, 14.8 V x 6.7 Ah = 356,976 J.
DEFAULT_CAPACITY_J = 14.8 * 6.7 * 3600.0

# Charging pads and tether docks both deliver a constant (linear) charge rate.
STATION_CHARGE_W = 300.0


@dataclass(frozen=True)
class BatteryState:
    energy: float  # joules
    capacity: float = DEFAULT_CAPACITY_J

    def __post_init__(self):
        if not (0.0 <= self.energy <= self.capacity):
            raise ValueError(f"battery energy {self.energy} outside [0, {self.capacity}]")

    @property
    def frac(self) -> float:
        return self.energy / self.capacity


@dataclass(frozen=True)
class PowerModel:
    """Rotary-wing propulsion coefficients for the 2.0 kg airframe.

    Hover power is p_blade + p_induced. drag_coeff is calibrated (see
    `calibrate_drag_coeff`) so the energy-optimal speed is 6.2 m/s.
    """

    p_blade: float = 90.0  # blade profile power at hover, W
    p_induced: float = 120.0  # induced power at hover, W
    tip_speed: float = 120.0  # rotor tip speed, m/s
    v_induced_hover: float = 4.03  # mean rotor induced velocity at hover, m/s
    drag_coeff: float = 0.075  # lumped parasite drag, W*s^3/m^3
    mass_total: float = 2.0  # kg (1500 g frame + 500 g battery)
    gravity: float = 9.81  # m/s^2

    def __post_init__(self):
        for name in ("p_blade", "p_induced", "tip_speed", "v_induced_hover", "drag_coeff",
                     "mass_total", "gravity"):
            if getattr(self, name) <= 0:
                raise ValueError(f"PowerModel.{name} must be positive")

    @property
    def hover_power(self) -> float:
        return self.p_blade + self.p_induced


@dataclass(frozen=True)
class LaserLink:
    """End-to-end laser power link from a ground beam director to the drone.

    Defaults calibrated jointly so that harvested power at 325 m is ~426 W
    (with a 2 kW source) and the hover break-even range lands near 2.4 km.
    """

    source_power: float = 2000.0  # W at the laser source
    conversion_eff: float = 0.22  # electro-optical + photovoltaic, dimensionless
    beam_radius_0: float = 0.01  # exit-aperture beam radius, m
    divergence: float = 5e-5  # half-angle, rad
    receiver_radius: float = 0.1  # photovoltaic receiver radius, m
    extinction: float = 1e-4  # atmospheric attenuation, 1/m

    def __post_init__(self):
        if not (0.0 < self.conversion_eff <= 1.0):
            raise ValueError("conversion_eff must be in (0, 1]")
        for name in ("source_power", "beam_radius_0", "divergence", "receiver_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"LaserLink.{name} must be positive")
        if self.extinction < 0:
            raise ValueError("extinction must be >= 0")


# --- scalar cores (njit-compatible: plain floats and math.*) ---------------


def propulsion_power_s(v, p_blade, p_induced, tip_speed, v0, drag_coeff):
    blade = p_blade * (1.0 + 3.0 * v * v / (tip_speed * tip_speed))
    induced = p_induced * math.sqrt(
        math.sqrt(1.0 + v**4 / (4.0 * v0**4)) - v * v / (2.0 * v0 * v0)
    )
    return blade + induced + drag_coeff * v**3


def vertical_power_s(rate, hover_w, mass, gravity):
    if rate > 0.0:
        return hover_w + mass * gravity * rate
    if rate < 0.0:
        return max(hover_w - mass * gravity * (-rate), 0.5 * hover_w)
    return hover_w


def laser_harvest_power_s(slant, source_power, eff, r0, divergence, r_rx, extinction):
    r_beam = r0 + divergence * slant
    capture = (r_rx / r_beam) ** 2
    if capture > 1.0:
        capture = 1.0
    return eff * source_power * capture * math.exp(-extinction * slant)


def battery_step_s(energy, capacity, harvest, consumption, dt):
    pre = energy + (harvest - consumption) * dt
    depleted = pre < 0.0
    if pre < 0.0:
        pre = 0.0
    elif pre > capacity:
        pre = capacity
    return pre, depleted


# --- public API -------------------------------------------------------------


def propulsion_power(model: PowerModel, v: float) -> float:
    """Level-flight propulsion power at ground speed v (>= 0)."""
    if v < 0:
        raise ValueError("v must be >= 0")
    return propulsion_power_s(
        v, model.p_blade, model.p_induced, model.tip_speed, model.v_induced_hover,
        model.drag_coeff,
    )


def vertical_power(model: PowerModel, climb_rate: float) -> float:
    """Power while climbing (rate > 0) or descending (rate < 0) in place.

    Descent power is floored at half hover power; free descent is not modeled.
    """
    return vertical_power_s(climb_rate, model.hover_power, model.mass_total, model.gravity)


def laser_harvest_power(link: LaserLink, slant: float) -> float:
    """Received electrical power at slant distance `slant` from the director."""
    if slant < 0:
        raise ValueError("slant must be >= 0")
    return laser_harvest_power_s(
        slant, link.source_power, link.conversion_eff, link.beam_radius_0,
        link.divergence, link.receiver_radius, link.extinction,
    )


def battery_step(
    b: BatteryState, harvest: float, consumption: float, dt: float
) -> tuple[BatteryState, bool]:
    """Integrate one step; energy clamped to [0, capacity].

    The depleted flag is set iff the pre-clamp energy went negative.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if harvest < 0 or consumption < 0:
        raise ValueError("harvest and consumption must be >= 0")
    e, depleted = battery_step_s(b.energy, b.capacity, harvest, consumption, dt)
    return BatteryState(e, b.capacity), depleted


def station_charge_power() -> float:
    """Constant charge power while landed on a pad or docked to a tether."""
    return STATION_CHARGE_W


def optimal_speed(model: PowerModel, v_max: float = 20.0, step: float = 0.01) -> float:
    """Grid-search argmin of propulsion power over [0, v_max]."""
    best_v = 0.0
    best_p = propulsion_power(model, 0.0)
    n = int(round(v_max / step))
    for i in range(1, n + 1):
        v = i * step
        p = propulsion_power(model, v)
        if p < best_p:
            best_p = p
            best_v = v
    return best_v


def calibrate_drag_coeff(
    model: PowerModel, target_speed: float = 6.2, tol: float = 0.005
) -> float:
    """Bisect drag_coeff until the energy-optimal speed hits target_speed.

    Larger drag shifts the optimum toward lower speeds, so the argmin is
    monotone decreasing in drag_coeff and bisection applies.
    """
    lo, hi = 1e-4, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        m = PowerModel(
            p_blade=model.p_blade, p_induced=model.p_induced, tip_speed=model.tip_speed,
            v_induced_hover=model.v_induced_hover, drag_coeff=mid,
            mass_total=model.mass_total, gravity=model.gravity,
        )
        if optimal_speed(m) > target_speed:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * 1e-3:
            break
    return 0.5 * (lo + hi)


def laser_breakeven_range(
    link: LaserLink, model: PowerModel, max_range: float = 20000.0, tol: float = 0.1
) -> float | None:
    """Slant distance where harvested power equals hover power, by bisection.

    Returns None when harvest never reaches hover power ("never-chargeable").
    When harvest still exceeds hover power at max_range, returns max_range
    (effectively never-discharging within the modeled span).
    """
    hover = model.hover_power
    if laser_harvest_power(link, 0.0) <= hover:
        return None
    if laser_harvest_power(link, max_range) >= hover:
        return max_range
    lo, hi = 0.0, max_range
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if laser_harvest_power(link, mid) > hover:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
