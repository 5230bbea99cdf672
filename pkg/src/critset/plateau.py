"""Smooth plateau bumps used to glue the construction across cube shells.

The 1-D profile is the smooth step ``phi(u) = expit(1/(1-u) - 1/u)``: 0 for
``u <= 0``, 1 for ``u >= 1`` and ``C^inf`` everywhere.  A bump around a child
cube is the coordinate product of ``phi((half_support - |x - c|) / width)``,
which equals 1 on the plateau cube and vanishes off the support cube.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import expit

from .cantor import GeomSchedule, child_offsets, cube_of, plateau_geometry

__all__ = [
    "ramp_jet",
    "profile_sups",
    "PlateauSpec",
    "plateau_spec",
    "bump_jet",
    "bump_derivative",
    "plateau_bounds",
]

# exp(-700) is below every derivative we could resolve; clamp there
_EDGE = 1.0 / 700.0


def ramp_jet(u, order: int) -> np.ndarray:
    """Derivatives ``phi^(m)(u)`` for ``m = 0..order``; shape ``(order + 1, len(u))``.

    Taylor coefficients of ``y = expit(g)`` follow from ``y' = y (1 - y) g'``,
    with ``g = 1/(1-u) - 1/u``.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.zeros((order + 1, u.size))
    out[0] = np.where(u >= 1.0 - _EDGE, 1.0, 0.0)
    live = (u > _EDGE) & (u < 1.0 - _EDGE)
    if not live.any():
        return out
    v = u[live]
    # a[m] = g^(m)(v) / m!
    a = np.array([1.0 / (1 - v) ** (m + 1) - (-1.0) ** m / v ** (m + 1) for m in range(order + 1)])
    y = np.zeros((order + 1, v.size))
    w = np.zeros((order + 1, v.size))
    y[0] = expit(a[0])
    lo = expit(-a[0])
    w[0] = y[0] * lo
    centre = lo - y[0]  # 1 - 2*y0, without cancellation
    for m in range(order):
        y[m + 1] = sum(w[j] * (m - j + 1) * a[m - j + 1] for j in range(m + 1)) / (m + 1)
        nxt = m + 1
        w[nxt] = y[nxt] * centre - sum(y[i] * y[nxt - i] for i in range(1, nxt))
    for m in range(order + 1):
        out[m, live] = math.factorial(m) * y[m]
    return out


@lru_cache(maxsize=None)
def profile_sups(order: int, grid: int = 10_000) -> tuple[float, ...]:
    """``sup |phi^(m)|`` for ``m = 0..order``, from a grid refined around each maximum."""
    u = np.linspace(0.0, 1.0, grid + 1)
    jet = ramp_jet(u, order)
    sups = []
    for m in range(order + 1):
        i = int(np.argmax(np.abs(jet[m])))
        lo, hi = u[max(i - 1, 0)], u[min(i + 1, grid)]
        fine = np.linspace(lo, hi, 2001)
        best = max(float(np.abs(jet[m, i])), float(np.max(np.abs(ramp_jet(fine, m)[m]))))
        sups.append(best * (1 + 1e-6))
    return tuple(sups)


@dataclass(frozen=True)
class PlateauSpec:
    """Derivative constants of the bump family.

    ``M[p]`` bounds ``||D^p h|| * pi_{k+1}**p`` (Frobenius norm) for every
    bump around a child of a depth-``k`` cube, ``k <= k_max``.
    """

    n: int
    p_max: int
    profile: tuple[float, ...]  # sup |phi^(m)|
    M: tuple[float, ...]
    k_max: int

    def to_json(self) -> dict:
        return {"n": self.n, "p_max": self.p_max, "profile_sups": list(self.profile), "M_p": list(self.M)}


def _tensor_constant(n: int, p: int, sups: tuple[float, ...]) -> float:
    total = 0.0
    for combo in itertools.product(range(n), repeat=p):
        counts = np.bincount(np.asarray(combo, dtype=int), minlength=n)
        total += math.prod(sups[c] ** 2 for c in counts)
    return math.sqrt(total)


def plateau_spec(n: int, p_max: int, sched: GeomSchedule) -> PlateauSpec:
    sups = profile_sups(p_max)
    # pi_{k+1} / (support - plateau) with L_k cancelled, so deep levels do not underflow
    k = np.arange(1, sched.k_max + 1)
    beta = sched.beta_table[1:]
    ratio = float(np.max(3 * beta / (16 * k * (0.25 - beta / 2))))
    M = tuple(_tensor_constant(n, p, sups) * ratio ** p for p in range(p_max + 1))
    return PlateauSpec(n, p_max, sups, M, sched.k_max - 1)


def bump_jet(x: np.ndarray, center: np.ndarray, plateau: float, support: float,
             order: int) -> np.ndarray:
    """Per-coordinate derivatives of the 1-D factors; shape ``(order + 1, n)``."""
    width = support - plateau
    d = x - center
    u = (support - np.abs(d)) / width
    jet = ramp_jet(u, order)
    scale = (-np.sign(d) / width)[None, :] ** np.arange(order + 1)[:, None]
    return jet * scale


def bump_derivative(jet: np.ndarray, p: int) -> np.ndarray:
    """Order-``p`` derivative tensor of the product bump from its coordinate jet."""
    n = jet.shape[1]
    if p == 0:
        return np.array(np.prod(jet[0]))
    out = np.empty((n,) * p)
    for combo in itertools.product(range(n), repeat=p):
        counts = np.bincount(np.asarray(combo, dtype=int), minlength=n)
        out[combo] = np.prod(jet[counts, np.arange(n)])
    return out


@dataclass(frozen=True)
class PlateauBound:
    p: int
    measured: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound


def _grid(lo: np.ndarray, hi: np.ndarray, points: int) -> np.ndarray:
    n = lo.size
    per_axis = max(int(round(points ** (1.0 / n))), 2)
    axes = [np.linspace(lo[j], hi[j], per_axis) for j in range(n)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)


def plateau_bounds(spec: PlateauSpec, k: int, sched: GeomSchedule,
                   points: int = 10_000) -> tuple[list[PlateauBound], float]:
    """Measured ``sup ||D^p h_i||`` against ``M_p * pi_{k+1}**-p`` for children of a depth-``k`` cube.

    Also returns the largest pointwise ``sum_i h_i`` over the parent cube,
    which must not exceed 1 when supports are disjoint.
    """
    n = spec.n
    parent = cube_of((1,) * k, n, sched)
    _, plateau, support = plateau_geometry(k, sched)
    signs = child_offsets(n)
    centres = parent.center + signs * parent.side / 4
    # child 1 sits in the lowest quadrant; all children are congruent
    grid = _grid(centres[0] - support, centres[0] + support, points)
    measured = np.zeros(spec.p_max + 1)
    for x in grid:
        jet = bump_jet(x, centres[0], plateau, support, spec.p_max)
        for p in range(spec.p_max + 1):
            measured[p] = max(measured[p], float(np.linalg.norm(bump_derivative(jet, p))))
    bounds = [PlateauBound(p, float(measured[p]), spec.M[p] * sched.pi(k + 1) ** -p)
              for p in range(spec.p_max + 1)]
    overlap = 0.0
    for x in _grid(parent.lo, parent.hi, points):
        total = sum(float(np.prod(bump_jet(x, c, plateau, support, 0)[0])) for c in centres)
        overlap = max(overlap, total)
    return bounds, overlap
