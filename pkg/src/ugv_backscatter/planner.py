"""Hexagonal network planning: layer count, cell radius and UGV schedule.

Cells surround the AP in rings ("layers"); layer k holds 6k cells and the
UGV visits them in spiral order 1..M. The cell radius is the largest one for
which every tag's path loss stays within ``pathloss_tolerance`` dB of its
cell centre's, subject to the UGV energy and time limits.

Two routes give the optimal layer count:

* :func:`optimal_layers` evaluates closed-form bounds on K (continuous
  relaxation of the layer index) and takes the smallest admissible integer.
* :func:`brute_force_layers` scans K = 1, 2, ... and checks the exact
  farthest/nearest-point distances of every layer.

The closed-form bounds are available in two variants. ``"derived"`` (the
default) solves each quadratic inequality directly. ``"printed"`` is an
alternative closed form that differs in a few places: no square root on the
inner term of K_II, an extra factor in the far-point discriminant,
10^(-theta/5alpha) where the near-point inequality has 10^(Theta/5alpha), no
S in K_A and a different far-point threshold xi_A. It is kept for comparison
only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import HexPlan, ScenarioConfig

__all__ = [
    "PlanningError",
    "PlanningBounds",
    "layer_index",
    "cell_count",
    "radius_from_layers",
    "motion_time",
    "ap_distance",
    "planning_bounds",
    "optimal_layers",
    "brute_force_layers",
    "layer_feasible",
    "plan",
    "ORACLE_CAP",
]

SQRT3 = math.sqrt(3.0)
ORACLE_CAP = 200
_CEIL_GUARD = 1e-9


class PlanningError(RuntimeError):
    """Planning failed; ``code`` is one of ``infeasible-energy``,
    ``infeasible-time``, ``no-feasible-K`` or ``negative-budget``."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


def _ceil(x: float) -> int:
    return math.ceil(x - _CEIL_GUARD)


def _floor(x: float) -> int:
    return math.floor(x + _CEIL_GUARD)


def layer_index(m):
    """Layer of cell ``m`` (1-based spiral numbering). Accepts arrays."""
    m = np.asarray(m)
    k = np.ceil(np.sqrt(12.0 * m + 6.0) / 6.0 - 0.5).astype(int)
    return int(k) if k.ndim == 0 else k


def cell_count(layers: int) -> int:
    return 3 * layers * layers + 3 * layers


def radius_from_layers(layers, area):
    """Cell radius that tessellates ``area`` with ``layers`` rings plus the centre cell."""
    kappa = 3.0 * np.square(layers) + 3.0 * np.asarray(layers) + 1.0
    return np.sqrt(2.0 * area / (3.0 * SQRT3 * kappa))


def motion_time(layers, area, speed):
    """Sub-slots the UGV spends driving through all cells of ``layers`` rings."""
    layers = np.asarray(layers, dtype=float)
    kappa = 3.0 * layers**2 + 3.0 * layers + 1.0
    return (kappa - 1.0) / speed * np.sqrt(2.0 * area / (SQRT3 * kappa))


def ap_distance(m, radius, ap_height):
    """AP-to-cell-centre distance, including the AP height."""
    k = layer_index(m)
    return np.sqrt(3.0 * radius**2 * np.square(k) + ap_height**2)


def _inverse_motion_time(t0: float, area: float, speed: float) -> float:
    # Real K with motion_time(K) == t0.
    x = SQRT3 * speed**2 * t0**2 / area
    inner = 9.0 + 3.0 * x + 6.0 * speed * t0 * math.sqrt(
        3.0 * speed**2 * t0**2 / (4.0 * area**2) + 2.0 * SQRT3 / area
    )
    return math.sqrt(inner) / 6.0 - 0.5


def _kappa_threshold_to_layers(xi: float) -> float:
    # Smallest real K with 3K^2 + 3K + 1 >= xi.
    return math.sqrt(max(12.0 * xi - 3.0, 0.0)) / 6.0 - 0.5


@dataclass(frozen=True)
class PlanningBounds:
    """Scalars bounding the admissible layer count.

    ``F``/``G`` are the energy/time upper limits on K. ``K_B``/``K_I`` are the
    lower limits from the far-point and near-point tolerance checks when the
    checked layer is the outermost one; ``K_A``/``K_II`` are the largest K for
    which that is the case. ``xi_A``/``xi_I`` are lower limits on
    3K^2 + 3K + 1 once the worst layer lies inside the disc.
    """

    F_0: float
    F: float
    G_0: float
    G: float
    theta: float
    theta_prime: float
    K_A: float
    K_B: float
    K_I: float
    K_II: float
    xi_A: float
    xi_I: float
    delta_a: float
    delta_1: float
    small_area: bool
    variant: str = "derived"

    @property
    def K_X(self) -> float:
        return _kappa_threshold_to_layers(self.xi_A)

    @property
    def K_Y(self) -> float:
        return _kappa_threshold_to_layers(self.xi_I)


def planning_bounds(config: ScenarioConfig, variant: str = "derived") -> PlanningBounds:
    """Compute every scalar bound on the layer count.

    Raises
    ------
    PlanningError
        ``infeasible-energy`` when the battery cannot even cover the circuit
        power of the sojourn time, ``infeasible-time`` when the sojourn time
        alone exceeds ``time_max``.
    """
    if variant not in ("derived", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    S = config.coverage_area
    d2 = config.ap_height**2
    alpha = config.pathloss_exponent
    nu = config.ugv_speed
    lam_s = config.tag_density * S
    e_max = config.ugv_energy_max / config.sub_slot_duration

    F_0 = (e_max - lam_s * config.circuit_power_reader) / (
        config.mobility_mu1 + config.mobility_mu2 * nu + config.circuit_power_reader
    )
    if F_0 <= 0:
        raise PlanningError("infeasible-energy", f"F_0 = {F_0:.6g} <= 0")
    G_0 = config.time_max - lam_s
    if G_0 <= 0:
        raise PlanningError("infeasible-time", f"G_0 = {G_0:.6g} <= 0")
    F = _inverse_motion_time(F_0, S, nu)
    G = _inverse_motion_time(G_0, S, nu)

    # beyond 1e100 the tolerance never binds; the cap avoids float overflow
    q = 10.0 ** min(config.pathloss_tolerance / (5.0 * alpha), 100.0)
    theta = q - 1.0
    theta_prime = (1.0 - q) ** 2 / (1.0 + q) ** 2
    h = 3.0 * SQRT3 * d2  # 3*sqrt(3)*d_AP^2
    small_area = S <= h / 2.0

    # Far point, outermost layer: -(2S+h)theta K^2 + (2S - h theta) K + (2S/3 - sqrt3 d^2 theta) <= 0.
    lead = (2.0 * S + h) * theta
    lin = 2.0 * S - h * theta
    const = 2.0 * S / 3.0 - SQRT3 * d2 * theta
    if variant == "derived":
        delta_a = lin**2 + 4.0 * lead * const
    else:
        delta_a = lin**2 + 4.0 * theta * (2.0 * S + h * theta) * const
    if const > 0 and delta_a >= 0:
        K_B = (lin + math.sqrt(delta_a)) / (2.0 * lead)
    else:
        K_B = 0.0

    # Near point, outermost layer: (2S+h)theta K^2 - (2S q - h theta) K + (sqrt3 d^2 theta + q S/2) >= 0.
    qn = q if variant == "derived" else 10.0 ** (-theta / (5.0 * alpha))
    lin_n = 2.0 * S * qn - h * theta
    const_n = SQRT3 * d2 * theta + qn * S / 2.0
    delta_1 = lin_n**2 - 4.0 * theta * const_n * (2.0 * S + h)
    if delta_1 >= 0 and lin_n > 0:
        K_I = (lin_n + math.sqrt(delta_1)) / (2.0 * theta * (2.0 * S + h))
    else:
        K_I = 0.0

    if small_area:
        K_A = K_II = math.inf
    elif variant == "derived":
        K_A = (3.0 * h - 4.0 * S + math.sqrt(16.0 * S**2 - 81.0 * d2**2)) / (12.0 * S - 6.0 * h)
        K_II = (h + S + math.sqrt(S**2 + 14.0 * SQRT3 * S * d2 - 9.0 * d2**2)) / (4.0 * S - 2.0 * h)
    else:
        K_A = (3.0 * h - 4.0 * S + math.sqrt(max(16.0 - 81.0 * d2**2 / S**2, 0.0))) / (12.0 * S - 6.0 * h)
        K_II = (h + S + (14.0 * SQRT3 * S * d2 + S**2 - 9.0 * d2**2)) / (4.0 * S - 2.0 * h)

    if variant == "derived":
        xi_A = S * (3.0 + 4.0 * theta) / (6.0 * SQRT3 * d2 * theta**2)
        xi_I = SQRT3 * S * (1.0 + theta) / (6.0 * d2 * theta**2)
    else:
        u = 2.0 * theta + 3.0
        xi_A = (
            2.0 * SQRT3 * S * u**2
            + math.sqrt(12.0 * S**2 * u**4 + 576.0 * S**2 * theta**2 * (4.0 * theta + 3.0))
        ) / (216.0 * d2 * theta**2)
        xi_I = SQRT3 * S * (1.0 - 2.0 * theta_prime) / (24.0 * d2 * theta_prime)

    return PlanningBounds(
        F_0=F_0,
        F=F,
        G_0=G_0,
        G=G,
        theta=theta,
        theta_prime=theta_prime,
        K_A=K_A,
        K_B=K_B,
        K_I=K_I,
        K_II=K_II,
        xi_A=xi_A,
        xi_I=xi_I,
        delta_a=delta_a,
        delta_1=delta_1,
        small_area=small_area,
        variant=variant,
    )


def _lowest_common(lo_a, hi_a, lo_b, hi_b):
    lo, hi = max(lo_a, lo_b), min(hi_a, hi_b)
    return lo if lo <= hi else None


def optimal_layers(config: ScenarioConfig, variant: str = "derived") -> int:
    """Closed-form optimal number of cell layers.

    For small areas (S <= 3*sqrt(3)/2 * d_AP^2) the outermost layer is always
    the worst one and K* = max{1, ceil(K_B), ceil(K_I)}. Otherwise the far- and
    near-point conditions each admit a low interval [K_B, K_A] / [K_I, K_II]
    and a tail; K* is the smallest integer in the intersection of the two
    unions, checked against the energy and time limits.
    """
    b = planning_bounds(config, variant)
    if b.small_area:
        k_star = max(1, _ceil(b.K_B), _ceil(b.K_I))
    else:
        inf = math.inf
        lo0, hi0 = max(1, _ceil(b.K_B)), _floor(b.K_A)
        loI, hiI = max(1, _ceil(b.K_I)), _floor(b.K_II)
        loX = max(1, _ceil(max(b.K_A, b.K_X)))
        loY = max(1, _ceil(max(b.K_II, b.K_Y)))
        candidates = [
            _lowest_common(lo0, hi0, loI, hiI),
            _lowest_common(loI, hiI, loX, inf),
            _lowest_common(lo0, hi0, loY, inf),
            max(loX, loY),
        ]
        k_star = min(c for c in candidates if c is not None)
    if not (k_star < b.F and k_star <= b.G + _CEIL_GUARD):
        raise PlanningError(
            "no-feasible-K",
            f"lower bound {k_star} exceeds energy/time limit min(F, G) = {min(b.F, b.G):.4g}",
        )
    return int(k_star)


def layer_feasible(config: ScenarioConfig, layers: int) -> bool:
    """Exact check of the motion-energy, time and path-loss tolerance limits for ``layers``."""
    S = config.coverage_area
    d2 = config.ap_height**2
    lam_s = config.tag_density * S
    e_max = config.ugv_energy_max / config.sub_slot_duration
    F_0 = (e_max - lam_s * config.circuit_power_reader) / (
        config.mobility_mu1 + config.mobility_mu2 * config.ugv_speed + config.circuit_power_reader
    )
    G_0 = config.time_max - lam_s
    t = float(motion_time(layers, S, config.ugv_speed))
    if not (t < F_0 and t <= G_0):
        return False
    r = float(radius_from_layers(layers, S))
    k = np.arange(1, layers + 1, dtype=float)
    d_centre = np.sqrt(3.0 * r**2 * k**2 + d2)
    d_far = np.sqrt((SQRT3 * r * k + SQRT3 * r / 2.0) ** 2 + (r / 2.0) ** 2 + d2)
    d_near = np.sqrt((SQRT3 * r * k - SQRT3 * r / 2.0) ** 2 + d2)
    scale = 10.0 * config.pathloss_exponent
    far_gap = scale * np.log10(d_far / d_centre)
    near_gap = scale * np.log10(d_centre / d_near)
    tol = config.pathloss_tolerance
    return bool(np.all(far_gap <= tol) and np.all(near_gap <= tol))


def brute_force_layers(config: ScenarioConfig, cap: int = ORACLE_CAP) -> int:
    """Smallest K in 1..cap that passes :func:`layer_feasible`."""
    for layers in range(1, cap + 1):
        if layer_feasible(config, layers):
            return layers
    raise PlanningError("no-feasible-K", f"no feasible layer count up to {cap}")


def plan(config: ScenarioConfig, method: str = "closed-form", variant: str = "derived") -> HexPlan:
    """Build the full :class:`HexPlan` for ``config``.

    ``method`` selects ``"closed-form"`` (default) or ``"oracle"`` for K*.
    """
    if method == "closed-form":
        k_star = optimal_layers(config, variant)
    elif method == "oracle":
        k_star = brute_force_layers(config)
    else:
        raise ValueError(f"unknown planning method {method!r}")

    S = config.coverage_area
    r = float(radius_from_layers(k_star, S))
    M = cell_count(k_star)
    kappa = M + 1
    tags_real = config.tag_density * S / kappa
    tags = max(1, int(round(tags_real))) if tags_real > 0 else 0
    cells = np.arange(1, M + 1)
    t = float(motion_time(k_star, S, config.ugv_speed))
    T = t + config.tag_density * S
    dur = config.sub_slot_duration
    budget = config.ugv_energy_max - dur * (
        (config.mobility_mu1 + config.mobility_mu2 * config.ugv_speed) * t
        + T * config.circuit_power_reader
    )
    if budget < 0:
        raise PlanningError("negative-budget", f"C = {budget:.6g} J < 0")
    return HexPlan(
        layers=k_star,
        radius=r,
        cells=M,
        tags_per_cell=tags,
        tags_per_cell_real=tags_real,
        layer_index=layer_index(cells),
        ap_distance=ap_distance(cells, r, config.ap_height),
        trajectory=cells,
        motion_time=t,
        block_length=T,
        tx_energy_budget=budget,
    )
