"""Hot mission-stepping kernels.

The per-step controller for all four charging policies and the episode loop
are written as scalar-loop functions over plain float64 arrays. With
UAVSIM_NUMBA=1 (the default) they are compiled with numba.njit; setting
UAVSIM_NUMBA=0 selects the pure-Python fallback path (same source,
interpreted). `python -m uavsim.bench` compares the two paths.

Within a step the order of application is fixed: (1) policy decision,
(2) motion, (3) uplink, (4) energy update. Mode recorded for a step is the
mode whose dynamics ran during that step, so traces can be replayed from
(mode, position) alone.
"""

import math
import os

from .energy import (
    battery_step_s,
    laser_harvest_power_s,
    propulsion_power_s,
    vertical_power_s,
)

NUMBA_ENABLED = os.environ.get("UAVSIM_NUMBA", "1") != "0"

if NUMBA_ENABLED:
    import numba

    def _jit(f):
        return numba.njit(cache=True)(f)
else:

    def _jit(f):
        return f


# policy codes
NONCHARGED = 0
CHARGED = 1
TETHERED = 2
LASER = 3

# drone modes
TRAVEL_TO_CLUSTER = 0
SERVING = 1
TRAVEL_TO_STATION = 2
DESCENDING = 3
CHARGING_ON_PAD = 4
ASCENDING = 5
DOCKING = 6
TETHERED_SERVING = 7
UNDOCKING = 8
EMERGENCY_LANDING = 9
LANDED = 10
DONE = 11

# event kinds
EV_CLUSTER_SERVED = 0
EV_CHARGE_START = 1
EV_CHARGE_STOP = 2
EV_DOCK = 3
EV_UNDOCK = 4
EV_EMERGENCY_LANDING = 5
EV_HARD_LANDING = 6
EV_MISSION_COMPLETE = 7

# parameter vector layout
P_DT = 0
P_ALT_OP = 1
P_V_CRUISE = 2
P_V_CLIMB = 3
P_R_COV = 4
P_RATE = 5
P_DOCK_TIME = 6
P_TETHER_LEN = 7
P_RESERVE = 8
P_RESUME = 9
P_CAP = 10
P_P_BLADE = 11
P_P_IND = 12
P_TIP = 13
P_V0 = 14
P_DRAG = 15
P_MASS = 16
P_GRAV = 17
P_CHARGE_W = 18
P_L_SRC = 19
P_L_EFF = 20
P_L_R0 = 21
P_L_DIV = 22
P_L_RX = 23
P_L_EXT = 24
P_BREAKEVEN_G = 25  # ground radius of the break-even disc; < 0 when none exists
P_SERVE_UNTETHERED = 26
P_X0 = 27
P_Y0 = 28
N_PRM = 29

# state vector layout
S_X = 0
S_Y = 1
S_ALT = 2
S_BATT = 3
S_BITS = 4
S_ODOM = 5
S_MODE = 6
S_TARGET = 7  # cluster or station id depending on mode; -1 none
S_TIMER = 8  # seconds remaining in a dock/undock procedure
S_ANCHOR = 9  # station id while hover-charging (laser) or docked (tethered)
S_EMERG_SENT = 10
S_HARD_SENT = 11
S_DONE_SENT = 12
N_STATE = 13

# record columns: t, x, y, alt, battery, bits, mode, uplink cluster (-1 none)
REC_COLS = 8
# event columns: t, kind, id, value (odometer for cluster_served)
EV_COLS = 4

# tolerance for "at the coverage boundary" / "at the station" checks
SERVE_EPS = 1e-6


_prop_power = _jit(propulsion_power_s)
_vert_power = _jit(vertical_power_s)
_laser_harvest = _jit(laser_harvest_power_s)
_batt_step = _jit(battery_step_s)


@_jit
def _nearest_unserved(x, y, remaining, cl_xy):
    best_i = -1
    best_d = 1e30
    for i in range(remaining.shape[0]):
        if remaining[i] > 0.0:
            dx = cl_xy[i, 0] - x
            dy = cl_xy[i, 1] - y
            d = math.sqrt(dx * dx + dy * dy)
            if d < best_d:  # strict: ties keep the lowest id
                best_d = d
                best_i = i
    return best_i, best_d


@_jit
def _nearest_station(x, y, st_xy):
    best_i = -1
    best_d = 1e30
    for i in range(st_xy.shape[0]):
        dx = st_xy[i, 0] - x
        dy = st_xy[i, 1] - y
        d = math.sqrt(dx * dx + dy * dy)
        if d < best_d:
            best_d = d
            best_i = i
    return best_i, best_d


@_jit
def _best_harvest(x, y, alt, st_xy, prm):
    # one beam director powers the drone at a time: the best one
    best = 0.0
    for i in range(st_xy.shape[0]):
        dx = st_xy[i, 0] - x
        dy = st_xy[i, 1] - y
        slant = math.sqrt(dx * dx + dy * dy + alt * alt)
        h = _laser_harvest(
            slant, prm[P_L_SRC], prm[P_L_EFF], prm[P_L_R0], prm[P_L_DIV],
            prm[P_L_RX], prm[P_L_EXT],
        )
        if h > best:
            best = h
    return best


@_jit
def _hover_power(prm):
    return prm[P_P_BLADE] + prm[P_P_IND]


@_jit
def _cruise_power(prm):
    return _prop_power(
        prm[P_V_CRUISE], prm[P_P_BLADE], prm[P_P_IND], prm[P_TIP], prm[P_V0], prm[P_DRAG]
    )


@_jit
def _descent_energy(alt, prm):
    if alt <= 0.0:
        return 0.0
    p = _vert_power(-prm[P_V_CLIMB], _hover_power(prm), prm[P_MASS], prm[P_GRAV])
    return p * (alt / prm[P_V_CLIMB])


@_jit
def _required_return(dist, alt, prm):
    travel = _cruise_power(prm) * (dist / prm[P_V_CRUISE])
    return travel + _descent_energy(alt, prm) + prm[P_RESERVE] * prm[P_CAP]


@_jit
def _tether_play(prm):
    h2 = prm[P_TETHER_LEN] * prm[P_TETHER_LEN] - prm[P_ALT_OP] * prm[P_ALT_OP]
    if h2 > 0.0:
        return math.sqrt(h2)
    return 0.0


@_jit
def _emit(ev, n_ev, t, kind, ident, value):
    ev[n_ev, 0] = t
    ev[n_ev, 1] = kind
    ev[n_ev, 2] = ident
    ev[n_ev, 3] = value
    return n_ev + 1


@_jit
def _tether_route(x, y, alt, batt, remaining, cl_xy, st_xy, prm):
    """Next goal for a tethered drone in free flight.

    Returns (mode, target): travel to a dock, travel to / serve a cluster on
    battery, or (-2, -1) when nothing remaining is reachable (untethered
    serving disabled).
    """
    n_s = st_xy.shape[0]
    r_cov = prm[P_R_COV]
    play = _tether_play(prm)
    reserve = prm[P_RESERVE] * prm[P_CAP]
    if n_s > 0:
        sid, sd = _nearest_station(x, y, st_xy)
        req = _required_return(sd, alt, prm)
        if batt <= req and batt >= req - reserve:
            return TRAVEL_TO_STATION, sid
    ci, cd = _nearest_unserved(x, y, remaining, cl_xy)
    serve_untethered = prm[P_SERVE_UNTETHERED] != 0.0
    if serve_untethered and cd <= r_cov + SERVE_EPS:
        return SERVING, ci
    if n_s > 0:
        did, dd = _nearest_station(cl_xy[ci, 0], cl_xy[ci, 1], st_xy)
        if dd <= r_cov + play + SERVE_EPS:
            return TRAVEL_TO_STATION, did
    if serve_untethered:
        return TRAVEL_TO_CLUSTER, ci
    # nearest remaining cluster that is reachable from some dock
    best_i = -1
    best_d = 1e30
    best_dock = -1
    for i in range(remaining.shape[0]):
        if remaining[i] <= 0.0:
            continue
        did, dd = _nearest_station(cl_xy[i, 0], cl_xy[i, 1], st_xy)
        if did >= 0 and dd <= r_cov + play + SERVE_EPS:
            dx = cl_xy[i, 0] - x
            dy = cl_xy[i, 1] - y
            d = math.sqrt(dx * dx + dy * dy)
            if d < best_d:
                best_d = d
                best_i = i
                best_dock = did
    if best_i >= 0:
        return TRAVEL_TO_STATION, best_dock
    return -2, -1


@_jit
def _step(policy, t, S, remaining, cl_xy, st_xy, prm, ev, n_ev):
    """Advance the drone by one dt. Returns (n_ev, uplinked cluster or -1)."""
    dt = prm[P_DT]
    alt_op = prm[P_ALT_OP]
    v_cruise = prm[P_V_CRUISE]
    v_climb = prm[P_V_CLIMB]
    r_cov = prm[P_R_COV]
    cap = prm[P_CAP]
    n_s = st_xy.shape[0]
    mode = int(S[S_MODE])

    if mode == DONE:
        return n_ev, -1
    if mode == LANDED:
        S[S_MODE] = DONE
        return n_ev, -1

    # ---- decision ----
    all_served = True
    for i in range(remaining.shape[0]):
        if remaining[i] > 0.0:
            all_served = False
            break
    if all_served and mode != EMERGENCY_LANDING:
        S[S_MODE] = DONE
        if S[S_DONE_SENT] == 0.0:
            n_ev = _emit(ev, n_ev, t, EV_MISSION_COMPLETE, -1.0, 0.0)
            S[S_DONE_SENT] = 1.0
        return n_ev, -1

    hover_w = _hover_power(prm)

    # procedure completions (conditions created by the previous step's motion)
    if mode == EMERGENCY_LANDING:
        if S[S_ALT] <= 0.0:
            S[S_MODE] = LANDED
            return n_ev, -1
    elif mode == DESCENDING:
        if S[S_ALT] <= 0.0:
            n_ev = _emit(ev, n_ev, t, EV_CHARGE_START, S[S_TARGET], 0.0)
            mode = CHARGING_ON_PAD
    elif mode == ASCENDING:
        if S[S_ALT] >= alt_op - 1e-9:
            S[S_ALT] = alt_op
            mode = TRAVEL_TO_CLUSTER
    elif mode == DOCKING:
        if S[S_TIMER] <= 1e-9:
            n_ev = _emit(ev, n_ev, t, EV_DOCK, S[S_TARGET], 0.0)
            S[S_ANCHOR] = S[S_TARGET]
            S[S_TARGET] = -1.0
            mode = TETHERED_SERVING
    elif mode == UNDOCKING:
        if S[S_TIMER] <= 1e-9:
            n_ev = _emit(ev, n_ev, t, EV_UNDOCK, S[S_TARGET], 0.0)
            S[S_ANCHOR] = -1.0
            S[S_TARGET] = -1.0
            mode = TRAVEL_TO_CLUSTER
    elif mode == TRAVEL_TO_STATION and policy != TETHERED:
        sid = int(S[S_TARGET])
        dx = st_xy[sid, 0] - S[S_X]
        dy = st_xy[sid, 1] - S[S_Y]
        if math.sqrt(dx * dx + dy * dy) <= SERVE_EPS:
            S[S_X] = st_xy[sid, 0]
            S[S_Y] = st_xy[sid, 1]
            if policy == CHARGED:
                mode = DESCENDING
            else:
                # laser drone charges hovering overhead, no descent
                n_ev = _emit(ev, n_ev, t, EV_CHARGE_START, S[S_TARGET], 0.0)
                S[S_ANCHOR] = S[S_TARGET]
                mode = CHARGING_ON_PAD
    elif mode == TRAVEL_TO_STATION and policy == TETHERED:
        sid = int(S[S_TARGET])
        dx = st_xy[sid, 0] - S[S_X]
        dy = st_xy[sid, 1] - S[S_Y]
        if math.sqrt(dx * dx + dy * dy) <= SERVE_EPS:
            S[S_X] = st_xy[sid, 0]
            S[S_Y] = st_xy[sid, 1]
            S[S_TIMER] = prm[P_DOCK_TIME]
            mode = DOCKING

    # stationary charging: pad (charged, on the ground) or hover (laser)
    if mode == CHARGING_ON_PAD:
        if policy == CHARGED:
            if S[S_BATT] >= prm[P_RESUME] * cap:
                n_ev = _emit(ev, n_ev, t, EV_CHARGE_STOP, S[S_TARGET], 0.0)
                mode = ASCENDING
        else:
            if S[S_BATT] >= prm[P_RESUME] * cap:
                n_ev = _emit(ev, n_ev, t, EV_CHARGE_STOP, S[S_ANCHOR], 0.0)
                S[S_ANCHOR] = -1.0
                mode = TRAVEL_TO_CLUSTER
            else:
                ci, cd = _nearest_unserved(S[S_X], S[S_Y], remaining, cl_xy)
                if ci >= 0 and cd <= r_cov + SERVE_EPS:
                    # keep charging but serve what is in range
                    S[S_TARGET] = float(ci)
                    mode = SERVING

    # laser drone serving while anchored to its hover-charge point
    if mode == SERVING and policy == LASER and S[S_ANCHOR] >= 0.0:
        if S[S_BATT] >= prm[P_RESUME] * cap:
            n_ev = _emit(ev, n_ev, t, EV_CHARGE_STOP, S[S_ANCHOR], 0.0)
            S[S_ANCHOR] = -1.0
            mode = TRAVEL_TO_CLUSTER
        else:
            ci, cd = _nearest_unserved(S[S_X], S[S_Y], remaining, cl_xy)
            if ci >= 0 and cd <= r_cov + SERVE_EPS:
                S[S_TARGET] = float(ci)
            else:
                S[S_TARGET] = S[S_ANCHOR]
                mode = CHARGING_ON_PAD

    # docked: serve everything reachable through the tether, leave when
    # recharged and nothing servable remains
    if mode == TETHERED_SERVING:
        dock_id = int(S[S_ANCHOR])
        play = _tether_play(prm)
        best_i = -1
        best_d = 1e30
        for i in range(remaining.shape[0]):
            if remaining[i] <= 0.0:
                continue
            ddx = cl_xy[i, 0] - st_xy[dock_id, 0]
            ddy = cl_xy[i, 1] - st_xy[dock_id, 1]
            if math.sqrt(ddx * ddx + ddy * ddy) <= r_cov + play + SERVE_EPS:
                dx = cl_xy[i, 0] - S[S_X]
                dy = cl_xy[i, 1] - S[S_Y]
                d = math.sqrt(dx * dx + dy * dy)
                if d < best_d:
                    best_d = d
                    best_i = i
        if best_i >= 0:
            S[S_TARGET] = float(best_i)
        else:
            S[S_TARGET] = -1.0
            if S[S_BATT] >= prm[P_RESUME] * cap:
                S[S_TARGET] = S[S_ANCHOR]
                S[S_TIMER] = prm[P_DOCK_TIME]
                mode = UNDOCKING

    # low-battery safety in free flight
    laser_anchored = policy == LASER and S[S_ANCHOR] >= 0.0
    if (
        mode == TRAVEL_TO_CLUSTER or mode == TRAVEL_TO_STATION
        or (mode == SERVING and not laser_anchored)
    ):
        e_th = _descent_energy(S[S_ALT], prm) + prm[P_RESERVE] * cap
        if S[S_BATT] <= e_th:
            mode = EMERGENCY_LANDING
            if S[S_EMERG_SENT] == 0.0:
                n_ev = _emit(ev, n_ev, t, EV_EMERGENCY_LANDING, -1.0, 0.0)
                S[S_EMERG_SENT] = 1.0

    # mission routing
    if mode == TRAVEL_TO_CLUSTER or (mode == SERVING and not laser_anchored):
        if policy == TETHERED:
            new_mode, tgt = _tether_route(
                S[S_X], S[S_Y], S[S_ALT], S[S_BATT], remaining, cl_xy, st_xy, prm
            )
            if new_mode == -2:
                S[S_MODE] = DONE
                return n_ev, -1
            mode = new_mode
            S[S_TARGET] = float(tgt)
        else:
            diverted = False
            if policy == CHARGED and n_s > 0:
                sid, sd = _nearest_station(S[S_X], S[S_Y], st_xy)
                req = _required_return(sd, S[S_ALT], prm)
                if S[S_BATT] <= req and S[S_BATT] >= req - prm[P_RESERVE] * cap:
                    mode = TRAVEL_TO_STATION
                    S[S_TARGET] = float(sid)
                    diverted = True
            elif policy == LASER and n_s > 0 and prm[P_BREAKEVEN_G] >= 0.0:
                sid, sd = _nearest_station(S[S_X], S[S_Y], st_xy)
                d_disc = sd - prm[P_BREAKEVEN_G]
                if d_disc < 0.0:
                    d_disc = 0.0
                req = _required_return(d_disc, S[S_ALT], prm)
                if S[S_BATT] <= req and S[S_BATT] >= req - prm[P_RESERVE] * cap:
                    mode = TRAVEL_TO_STATION
                    S[S_TARGET] = float(sid)
                    diverted = True
            if not diverted:
                ci, cd = _nearest_unserved(S[S_X], S[S_Y], remaining, cl_xy)
                S[S_TARGET] = float(ci)
                if cd <= r_cov + SERVE_EPS:
                    mode = SERVING
                else:
                    mode = TRAVEL_TO_CLUSTER
    elif mode == TRAVEL_TO_STATION and policy == TETHERED:
        new_mode, tgt = _tether_route(
            S[S_X], S[S_Y], S[S_ALT], S[S_BATT], remaining, cl_xy, st_xy, prm
        )
        if new_mode == -2:
            S[S_MODE] = DONE
            return n_ev, -1
        mode = new_mode
        S[S_TARGET] = float(tgt)

    # ---- motion ----
    hstep = 0.0
    dalt = 0.0
    if mode == TRAVEL_TO_CLUSTER:
        ci = int(S[S_TARGET])
        dx = cl_xy[ci, 0] - S[S_X]
        dy = cl_xy[ci, 1] - S[S_Y]
        d = math.sqrt(dx * dx + dy * dy)
        gap = d - r_cov  # stop at the coverage boundary
        if gap > 0.0:
            hstep = min(v_cruise * dt, gap)
            S[S_X] += hstep * dx / d
            S[S_Y] += hstep * dy / d
    elif mode == TRAVEL_TO_STATION:
        sid = int(S[S_TARGET])
        dx = st_xy[sid, 0] - S[S_X]
        dy = st_xy[sid, 1] - S[S_Y]
        d = math.sqrt(dx * dx + dy * dy)
        if d > 0.0:
            hstep = min(v_cruise * dt, d)
            if hstep >= d:
                S[S_X] = st_xy[sid, 0]
                S[S_Y] = st_xy[sid, 1]
                hstep = d
            else:
                S[S_X] += hstep * dx / d
                S[S_Y] += hstep * dy / d
    elif mode == TETHERED_SERVING and S[S_TARGET] >= 0.0:
        ci = int(S[S_TARGET])
        cx = cl_xy[ci, 0]
        cy = cl_xy[ci, 1]
        dcx = cx - S[S_X]
        dcy = cy - S[S_Y]
        d_c = math.sqrt(dcx * dcx + dcy * dcy)
        if d_c > r_cov + SERVE_EPS:
            dock_id = int(S[S_ANCHOR])
            vx = cx - st_xy[dock_id, 0]
            vy = cy - st_xy[dock_id, 1]
            vn = math.sqrt(vx * vx + vy * vy)
            play = _tether_play(prm)
            if vn <= play or vn == 0.0:
                qx = cx
                qy = cy
            else:
                qx = st_xy[dock_id, 0] + vx / vn * play
                qy = st_xy[dock_id, 1] + vy / vn * play
            wx = qx - S[S_X]
            wy = qy - S[S_Y]
            wd = math.sqrt(wx * wx + wy * wy)
            if wd > 0.0:
                wx /= wd
                wy /= wd
                step = min(v_cruise * dt, wd)
                # halt where the distance to the cluster first equals r_cov
                b = wx * (S[S_X] - cx) + wy * (S[S_Y] - cy)
                disc = b * b - (d_c * d_c - r_cov * r_cov)
                if disc >= 0.0:
                    s_hit = -b - math.sqrt(disc)
                    if 0.0 <= s_hit < step:
                        step = s_hit
                S[S_X] += step * wx
                S[S_Y] += step * wy
                hstep = step
    elif mode == DESCENDING or mode == EMERGENCY_LANDING:
        dalt = -min(v_climb * dt, S[S_ALT])
    elif mode == ASCENDING:
        dalt = min(v_climb * dt, alt_op - S[S_ALT])
    elif mode == DOCKING or mode == UNDOCKING:
        elapsed = prm[P_DOCK_TIME] - S[S_TIMER]
        t_down = min(alt_op / v_climb, prm[P_DOCK_TIME] * 0.5)
        if elapsed < t_down:
            dalt = -min(v_climb * dt, S[S_ALT])
        elif elapsed >= prm[P_DOCK_TIME] - t_down:
            dalt = min(v_climb * dt, alt_op - S[S_ALT])
        S[S_TIMER] -= dt
    S[S_ALT] += dalt
    S[S_ODOM] += hstep + abs(dalt)

    # ---- uplink ----
    upl = -1
    if (mode == SERVING or mode == TETHERED_SERVING) and S[S_TARGET] >= 0.0:
        ci = int(S[S_TARGET])
        if remaining[ci] > 0.0:
            dx = cl_xy[ci, 0] - S[S_X]
            dy = cl_xy[ci, 1] - S[S_Y]
            if math.sqrt(dx * dx + dy * dy) <= r_cov + SERVE_EPS:
                tr = prm[P_RATE] * dt
                if tr > remaining[ci]:
                    tr = remaining[ci]
                remaining[ci] -= tr
                S[S_BITS] += tr
                if tr > 0.0:
                    upl = ci
                if remaining[ci] <= 0.0:
                    remaining[ci] = 0.0
                    n_ev = _emit(ev, n_ev, t, EV_CLUSTER_SERVED, float(ci), S[S_ODOM])

    # ---- energy ----
    cons = 0.0
    if mode == TRAVEL_TO_CLUSTER or mode == TRAVEL_TO_STATION:
        cons = _prop_power(
            hstep / dt, prm[P_P_BLADE], prm[P_P_IND], prm[P_TIP], prm[P_V0], prm[P_DRAG]
        )
    elif mode == SERVING:
        cons = hover_w
    elif mode == DESCENDING or mode == ASCENDING or mode == EMERGENCY_LANDING:
        cons = _vert_power(dalt / dt, hover_w, prm[P_MASS], prm[P_GRAV])
    elif mode == DOCKING or mode == UNDOCKING:
        cons = hover_w
    elif mode == CHARGING_ON_PAD:
        if policy == LASER:
            cons = hover_w
    # TETHERED_SERVING: propulsion drawn through the tether, none from battery

    harv = 0.0
    if policy == LASER:
        if n_s > 0:
            harv = _best_harvest(S[S_X], S[S_Y], S[S_ALT], st_xy, prm)
    elif policy == CHARGED:
        if mode == CHARGING_ON_PAD:
            harv = prm[P_CHARGE_W]
    elif policy == TETHERED:
        if mode == TETHERED_SERVING:
            harv = prm[P_CHARGE_W]

    e, depleted = _batt_step(S[S_BATT], cap, harv, cons, dt)
    S[S_BATT] = e
    if depleted and S[S_HARD_SENT] == 0.0:
        n_ev = _emit(ev, n_ev, t, EV_HARD_LANDING, -1.0, 0.0)
        S[S_HARD_SENT] = 1.0

    S[S_MODE] = float(mode)
    return n_ev, upl


@_jit
def _episode(policy, n_steps, stride, cl_xy, cl_bits, st_xy, prm, rec, ev, S):
    """Run one mission. Fills rec/ev/S in place; returns (n_rec, n_ev)."""
    dt = prm[P_DT]
    for i in range(N_STATE):
        S[i] = 0.0
    S[S_X] = prm[P_X0]
    S[S_Y] = prm[P_Y0]
    S[S_ALT] = prm[P_ALT_OP]
    S[S_BATT] = prm[P_CAP]
    S[S_MODE] = TRAVEL_TO_CLUSTER
    S[S_TARGET] = -1.0
    S[S_ANCHOR] = -1.0
    remaining = cl_bits.copy()

    rec[0, 0] = 0.0
    rec[0, 1] = S[S_X]
    rec[0, 2] = S[S_Y]
    rec[0, 3] = S[S_ALT]
    rec[0, 4] = S[S_BATT]
    rec[0, 5] = S[S_BITS]
    rec[0, 6] = S[S_MODE]
    rec[0, 7] = -1.0
    n_rec = 1
    n_ev = 0
    last_k = 0
    last_written = 0
    upl_last = -1
    for k in range(1, n_steps + 1):
        if S[S_MODE] == DONE:
            break
        t = k * dt
        n_ev, upl = _step(policy, t, S, remaining, cl_xy, st_xy, prm, ev, n_ev)
        last_k = k
        upl_last = upl
        if stride > 0 and (k % stride == 0 or S[S_MODE] == DONE):
            rec[n_rec, 0] = t
            rec[n_rec, 1] = S[S_X]
            rec[n_rec, 2] = S[S_Y]
            rec[n_rec, 3] = S[S_ALT]
            rec[n_rec, 4] = S[S_BATT]
            rec[n_rec, 5] = S[S_BITS]
            rec[n_rec, 6] = S[S_MODE]
            rec[n_rec, 7] = float(upl)
            n_rec += 1
            last_written = k
    if stride > 0 and last_k > 0 and last_written != last_k:
        rec[n_rec, 0] = last_k * dt
        rec[n_rec, 1] = S[S_X]
        rec[n_rec, 2] = S[S_Y]
        rec[n_rec, 3] = S[S_ALT]
        rec[n_rec, 4] = S[S_BATT]
        rec[n_rec, 5] = S[S_BITS]
        rec[n_rec, 6] = S[S_MODE]
        rec[n_rec, 7] = float(upl_last)
        n_rec += 1
    return n_rec, n_ev
