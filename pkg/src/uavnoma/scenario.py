"""Scenario: the full simulation parameter bundle.

Defaults follow the standard parameter table of this system (3 GHz
carrier, 20 MHz bandwidth, -144 dBm/Hz noise density, -10 dB residual
level, rate targets 1.0 / 0.05 bits/s/Hz, fading severities 5/3/1/5) and
the reference four-node placement. dB-valued fields carry a `_db` suffix,
dBm a `_dbm` suffix; everything else is linear / SI.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .channel import db_to_linear
from .geometry import Position3D, Topology, distance
from .protocol import PowerAllocation

OPTIMIZE = "optimize"

DEFAULT_POS_C = (-1.96, 7.33, 0.0)
DEFAULT_POS_E = (-13.49, -18.85, 0.23)
DEFAULT_POS_F = (0.0, 0.0, 0.0)
DEFAULT_POS_U = (-6.66, -7.62, 6.77)
NETWORK_DIM_M = 50.0


@dataclass(frozen=True)
class Scenario:
    pos_c: tuple = DEFAULT_POS_C
    pos_e: tuple = DEFAULT_POS_E
    pos_f: tuple = DEFAULT_POS_F
    pos_u: tuple = DEFAULT_POS_U
    mobility_radius_m: float | None = None  # default: half the C-F distance
    r_th_c: float = 1.0
    r_th_e: float = 0.05
    xi_u: float = 0.1
    xi_f: float = 0.1
    fc_ghz: float = 3.0
    eta_los_db: float = 1.6
    eta_nlos_db: float = 23.0
    m_cf: int = 5
    m_cu: int = 3
    m_eu: int = 1
    m_uf: int = 5
    sr_b: float = 0.5
    sr_omega: float = 1.0
    gain_tx_dbi: float = 0.0
    gain_rx_dbi: float = 0.0
    noise_density_dbm_hz: float = -144.0
    bandwidth_hz: float = 20e6
    sigma2_u_dbm: float | None = None  # override; default derived from density
    sigma2_f_dbm: float | None = None
    p_max1_dbm: float = 30.0
    p_max2_dbm: float = 30.0
    theta1: float | str = 0.5  # share of the phase budget given to the center user
    theta2: float | str = 0.5  # either a float in [0, 1] or "optimize"
    v_min: float = 0.1
    v_max: float = 1.0

    def __post_init__(self):
        for name in ("pos_c", "pos_e", "pos_f", "pos_u"):
            p = tuple(float(v) for v in getattr(self, name))
            if len(p) != 3:
                raise ValueError(f"{name} must have exactly three coordinates")
            object.__setattr__(self, name, p)
            Position3D(*p)  # validates finiteness and altitude
        if not 0.0 <= self.xi_u <= 1.0 or not 0.0 <= self.xi_f <= 1.0:
            raise ValueError("residual levels must lie in [0, 1]")
        if self.r_th_c < 0 or self.r_th_e < 0:
            raise ValueError("rate targets must be non-negative")
        for name in ("m_cf", "m_cu", "m_eu", "m_uf"):
            m = getattr(self, name)
            if m < 1 or int(m) != m:
                raise ValueError(f"{name} must be a positive integer")
        if self.sr_b <= 0 or self.sr_omega < 0:
            raise ValueError("need sr_b > 0 and sr_omega >= 0")
        if self.fc_ghz <= 0 or self.bandwidth_hz <= 0:
            raise ValueError("carrier frequency and bandwidth must be positive")
        if not 0 < self.v_min <= self.v_max:
            raise ValueError("need 0 < v_min <= v_max")
        if self.mobility_radius_m is not None and self.mobility_radius_m <= 0:
            raise ValueError("mobility radius must be positive")
        for name in ("theta1", "theta2"):
            t = getattr(self, name)
            if isinstance(t, str):
                if t != OPTIMIZE:
                    raise ValueError(f"{name} must be a number or '{OPTIMIZE}'")
            elif not 0.0 <= float(t) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    # ---- derived quantities -------------------------------------------------

    @property
    def fc_hz(self) -> float:
        return self.fc_ghz * 1e9

    @property
    def sigma2_dbm(self) -> float:
        return self.noise_density_dbm_hz + 10.0 * math.log10(self.bandwidth_hz)

    @property
    def sigma2_u_w(self) -> float:
        dbm = self.sigma2_u_dbm if self.sigma2_u_dbm is not None else self.sigma2_dbm
        return db_to_linear(dbm - 30.0)

    @property
    def sigma2_f_w(self) -> float:
        dbm = self.sigma2_f_dbm if self.sigma2_f_dbm is not None else self.sigma2_dbm
        return db_to_linear(dbm - 30.0)

    @property
    def p_max1_w(self) -> float:
        return db_to_linear(self.p_max1_dbm - 30.0)

    @property
    def p_max2_w(self) -> float:
        return db_to_linear(self.p_max2_dbm - 30.0)

    @property
    def needs_optimization(self) -> bool:
        return self.theta1 == OPTIMIZE or self.theta2 == OPTIMIZE

    def topology(self) -> Topology:
        pc, pe, pf, pu = (
            Position3D(*self.pos_c),
            Position3D(*self.pos_e),
            Position3D(*self.pos_f),
            Position3D(*self.pos_u),
        )
        radius = self.mobility_radius_m
        if radius is None:
            radius = distance(pc, pf) / 2.0
        return Topology(pc, pe, pf, pu, radius)

    def powers(self, theta1=None, theta2=None) -> PowerAllocation:
        t1 = self.theta1 if theta1 is None else theta1
        t2 = self.theta2 if theta2 is None else theta2
        if isinstance(t1, str) or isinstance(t2, str):
            raise ValueError("power split is 'optimize'; resolve it before use")
        return PowerAllocation(t1, t2, self.p_max1_w, self.p_max2_w)

    def with_uav(self, pos: Position3D) -> "Scenario":
        return replace(self, pos_u=(pos.x, pos.y, pos.z))

    # ---- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


_FIELD_NAMES = {f.name for f in fields(Scenario)}


def scenario_from_dict(data: dict) -> Scenario:
    unknown = set(data) - _FIELD_NAMES
    if unknown:
        raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
    return Scenario(**data)


def scenario_from_json(text: str) -> Scenario:
    return scenario_from_dict(json.loads(text))


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        return scenario_from_json(fh.read())


def random_topology(seed: int, base: Scenario | None = None) -> Scenario:
    """Redraw the user positions uniformly within the network dimension.

    The fusion center stays at the origin; both users land in the
    50 m x 50 m box around it at their default altitudes, and the relay
    starts at the E-F midpoint at its default altitude.
    """
    base = base or Scenario()
    rng = np.random.default_rng(seed)
    half = NETWORK_DIM_M / 2.0
    pos_c = (rng.uniform(-half, half), rng.uniform(-half, half), base.pos_c[2])
    pos_e = (rng.uniform(-half, half), rng.uniform(-half, half), base.pos_e[2])
    pos_u = ((pos_e[0] + base.pos_f[0]) / 2.0, (pos_e[1] + base.pos_f[1]) / 2.0, base.pos_u[2])
    return replace(base, pos_c=pos_c, pos_e=pos_e, pos_u=pos_u)
