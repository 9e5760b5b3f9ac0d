"""3D node geometry and the random-waypoint motion process of the aerial relay."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class Position3D:
    """A point in 3D Cartesian coordinates, meters, with z >= 0."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError("coordinates must be finite")
        if self.z < 0:
            raise ValueError("altitude must be non-negative")


@dataclass(frozen=True)
class Topology:
    """Placement of the four nodes plus the relay's mobility disk radius."""

    pos_c: Position3D
    pos_e: Position3D
    pos_f: Position3D
    pos_u: Position3D
    mobility_radius: float

    def __post_init__(self):
        if self.mobility_radius <= 0:
            raise ValueError("mobility radius must be positive")
        nodes = [self.pos_c, self.pos_e, self.pos_f, self.pos_u]
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                if distance(nodes[i], nodes[j]) == 0:
                    raise ValueError("nodes must not coincide")


@dataclass(frozen=True)
class RwpState:
    """Snapshot of the random-waypoint process.

    The node sits at `current`, moving toward `waypoint` at `speed` meters
    per step inside the horizontal disk (`center`, `radius`). Altitude is
    constant throughout.
    """

    current: Position3D
    waypoint: Position3D
    speed: float
    center: Position3D
    radius: float
    v_min: float
    v_max: float

    def __post_init__(self):
        if not 0 < self.v_min <= self.v_max:
            raise ValueError("need 0 < v_min <= v_max")
        if self.radius < 0:
            raise ValueError("disk radius must be non-negative")
        for p in (self.current, self.waypoint):
            if _horizontal_dist(p, self.center) > self.radius + 1e-9:
                raise ValueError("position outside the mobility disk")


def distance(a: Position3D, b: Position3D) -> float:
    """Euclidean distance in meters."""
    return math.sqrt((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2)


def elevation_angle_deg(a: Position3D, b: Position3D) -> float:
    """Elevation angle of the slant path between two nodes, in [0, 90] degrees.

    Symmetric in its arguments (uses the absolute altitude difference).
    """
    d = distance(a, b)
    if d == 0:
        raise ValueError("elevation angle undefined for coincident points")
    return math.degrees(math.asin(abs(b.z - a.z) / d))


def _horizontal_dist(a: Position3D, b: Position3D) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def rwp_sample_waypoint(state: RwpState, rng: np.random.Generator) -> Position3D:
    """Draw a waypoint uniformly over the mobility disk, at the disk altitude.

    Inverse-CDF sampling (r = R*sqrt(u), theta = 2*pi*u') so no rejection
    loop is needed; consumes exactly two uniforms.
    """
    r = state.radius * math.sqrt(rng.random())
    theta = 2.0 * math.pi * rng.random()
    return Position3D(
        state.center.x + r * math.cos(theta),
        state.center.y + r * math.sin(theta),
        state.center.z,
    )


def rwp_init(
    center: Position3D,
    radius: float,
    v_min: float,
    v_max: float,
    rng: np.random.Generator,
) -> RwpState:
    """Start a random-waypoint process at the disk center."""
    state = RwpState(
        current=center,
        waypoint=center,
        speed=v_min,
        center=center,
        radius=radius,
        v_min=v_min,
        v_max=v_max,
    )
    waypoint = rwp_sample_waypoint(state, rng)
    speed = rng.uniform(v_min, v_max)
    return replace(state, waypoint=waypoint, speed=speed)


def rwp_step(state: RwpState, rng: np.random.Generator) -> RwpState:
    """Advance the process by one time step.

    Moves `speed` meters along the segment toward the waypoint. On arrival
    (remaining distance <= speed) the position snaps to the waypoint and a
    fresh waypoint and speed are drawn; pauses are not modeled.
    """
    cur, wp = state.current, state.waypoint
    remaining = _horizontal_dist(cur, wp)
    if remaining <= state.speed:
        new_wp = rwp_sample_waypoint(state, rng)
        new_speed = rng.uniform(state.v_min, state.v_max)
        return replace(state, current=wp, waypoint=new_wp, speed=new_speed)
    frac = state.speed / remaining
    new_pos = Position3D(
        cur.x + frac * (wp.x - cur.x),
        cur.y + frac * (wp.y - cur.y),
        cur.z,
    )
    return replace(state, current=new_pos)
