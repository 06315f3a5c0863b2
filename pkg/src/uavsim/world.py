"""Simulated area: uniformly scattered IoT clusters and ground power-station sites.

One Scenario is generated per trial and shared (immutable) by every policy run
of that trial, so comparisons between charging strategies are paired. Station
sites carry no kind here; each policy interprets the same site list as its own
station type (charging pad / tether dock / laser beam director).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Invalid world or run configuration."""


@dataclass(frozen=True)
class Position:
    x: float  # meters east
    y: float  # meters north


@dataclass(frozen=True)
class Cluster:
    id: int
    position: Position
    data_total: float  # bits
    served_order: int | None = None  # never set on shared scenarios; see Trace events


@dataclass(frozen=True)
class Station:
    id: int
    position: Position
    kind: str  # "ChargingPad" | "TetherDock" | "LaserDirector"


@dataclass(frozen=True)
class Scenario:
    area_side: float  # meters
    clusters: tuple[Cluster, ...]
    station_sites: tuple[Position, ...]
    seed: int

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    @property
    def n_stations(self) -> int:
        return len(self.station_sites)

    def cluster_xy(self) -> np.ndarray:
        """(n, 2) float64 cluster coordinates."""
        a = np.empty((len(self.clusters), 2), dtype=np.float64)
        for i, c in enumerate(self.clusters):
            a[i, 0] = c.position.x
            a[i, 1] = c.position.y
        return a

    def cluster_bits(self) -> np.ndarray:
        return np.array([c.data_total for c in self.clusters], dtype=np.float64)

    def station_xy(self, limit: int | None = None) -> np.ndarray:
        """(n, 2) float64 station coordinates, optionally the first `limit` sites."""
        sites = self.station_sites if limit is None else self.station_sites[:limit]
        a = np.empty((len(sites), 2), dtype=np.float64)
        for i, p in enumerate(sites):
            a[i, 0] = p.x
            a[i, 1] = p.y
        return a

    def with_stations(self, k: int) -> "Scenario":
        """Same clusters, truncated to the first k station sites (sweep pairing)."""
        return Scenario(self.area_side, self.clusters, self.station_sites[:k], self.seed)

    def to_json_dict(self) -> dict:
        return {
            "area_side_m": self.area_side,
            "seed": self.seed,
            "clusters": [
                {"id": c.id, "x": c.position.x, "y": c.position.y, "data_total_bits": c.data_total}
                for c in self.clusters
            ],
            "station_sites": [{"x": p.x, "y": p.y} for p in self.station_sites],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def content_hash(self) -> str:
        """Hash of the full scenario content, used for pairing checks."""
        return hashlib.sha256(
            json.dumps(self.to_json_dict(), sort_keys=True).encode()
        ).hexdigest()

    def cluster_hash(self) -> str:
        """Hash of clusters only; stable across station-count sweep points."""
        doc = {"area_side_m": self.area_side, "clusters": self.to_json_dict()["clusters"]}
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()


def scenario_from_json(text: str) -> Scenario:
    d = json.loads(text)
    clusters = tuple(
        Cluster(int(c["id"]), Position(float(c["x"]), float(c["y"])), float(c["data_total_bits"]))
        for c in d["clusters"]
    )
    sites = tuple(Position(float(p["x"]), float(p["y"])) for p in d["station_sites"])
    return Scenario(float(d["area_side_m"]), clusters, sites, int(d["seed"]))


def distance(p: Position, q: Position) -> float:
    """Euclidean ground distance in meters."""
    return math.hypot(p.x - q.x, p.y - q.y)


def slant_distance(p: Position, q: Position, altitude: float) -> float:
    """3-D distance between a ground point and a point `altitude` above the other."""
    if altitude < 0:
        raise ValueError("altitude must be >= 0")
    return math.sqrt((p.x - q.x) ** 2 + (p.y - q.y) ** 2 + altitude**2)


def generate_scenario(
    seed: int,
    area_side: float,
    n_clusters: int,
    n_stations: int,
    data_range: tuple[float, float],
) -> Scenario:
    """Generate a seed-reproducible scenario.

    Positions are i.i.d. uniform over the square, per-cluster data volumes
    i.i.d. uniform over `data_range` (bits). Uses the counter-based Philox
    bit generator with one spawned substream per entity class (cluster
    positions, cluster data, station positions), so output is a pure function
    of the arguments and independent of draw interleaving elsewhere.
    """
    lo, hi = data_range
    if lo <= 0 or lo > hi:
        raise ConfigError(f"invalid data_range ({lo}, {hi}): need 0 < min <= max")
    if area_side <= 0:
        raise ConfigError(f"area_side must be positive, got {area_side}")
    if n_clusters < 0 or n_stations < 0:
        raise ConfigError("entity counts must be >= 0")

    ss = np.random.SeedSequence(seed)
    ss_cpos, ss_cdata, ss_spos = ss.spawn(3)

    rng_cpos = np.random.Generator(np.random.Philox(ss_cpos))
    rng_cdata = np.random.Generator(np.random.Philox(ss_cdata))
    rng_spos = np.random.Generator(np.random.Philox(ss_spos))

    cxy = rng_cpos.uniform(0.0, area_side, size=(n_clusters, 2))
    cbits = rng_cdata.uniform(lo, hi, size=n_clusters)
    sxy = rng_spos.uniform(0.0, area_side, size=(n_stations, 2))

    clusters = tuple(
        Cluster(i, Position(float(cxy[i, 0]), float(cxy[i, 1])), float(cbits[i]))
        for i in range(n_clusters)
    )
    sites = tuple(Position(float(sxy[i, 0]), float(sxy[i, 1])) for i in range(n_stations))
    return Scenario(float(area_side), clusters, sites, int(seed))
