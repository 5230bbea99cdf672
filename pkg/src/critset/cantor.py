"""Nested cube system in ``[-1/2, 1/2]**n`` whose intersection is a Cantor set.

A cube of side ``L`` and centre ``c`` holds ``2**n`` children of side
``beta*L`` centred at ``c +- L/4`` in each coordinate.  At depth ``k`` the
shrink factor is ``beta_k = exp(-1/k)/2``, so depth-``k`` cubes have side
``L_k = beta_1 * ... * beta_k``.

Addresses are tuples of 1-based letters.  Letter ``i`` encodes the offset
signs through the binary digits of ``i - 1``: bit ``j`` set means ``+L/4`` in
coordinate ``j``.

Around each child the parent also carries a *plateau* (where the child's bump
function is 1) and a *support* cube (outside which the bump vanishes).  With
``g = 1/4 - beta/2`` the free margin around a child is ``g*L`` on every side;
the plateau takes the first third of it and the transition the second third.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "GeomSchedule",
    "GeomCube",
    "Region",
    "Location",
    "AddressError",
    "schedule",
    "cube_of",
    "child_offsets",
    "locate",
    "separation_check",
    "plateau_geometry",
]


class AddressError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GeomSchedule:
    """Tabulated ``beta_k``, ``L_k`` and ``pi_k``; index 0 of beta and pi is unused.

    ``L_k`` underflows near ``k = 1070``; the log tables stay finite.
    """

    k_max: int
    beta_table: np.ndarray
    L_table: np.ndarray
    pi_table: np.ndarray
    log_L_table: np.ndarray
    log_pi_table: np.ndarray

    def beta(self, k: int) -> float:
        self._check(k, lo=1)
        return float(self.beta_table[k])

    def L(self, k: int) -> float:
        self._check(k, lo=0)
        return float(self.L_table[k])

    def pi(self, k: int) -> float:
        self._check(k, lo=1)
        return float(self.pi_table[k])

    def _check(self, k: int, lo: int) -> None:
        if not lo <= k <= self.k_max:
            raise IndexError(f"schedule index {k} outside [{lo}, {self.k_max}]")

    def to_json(self) -> dict:
        return {
            "beta": self.beta_table[1:].tolist(),
            "L": self.L_table.tolist(),
            "pi": self.pi_table[1:].tolist(),
        }


@lru_cache(maxsize=None)
def schedule(k_max: int) -> GeomSchedule:
    """Tabulate the shrink factors, side lengths and separations up to ``k_max``."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    k = np.arange(1, k_max + 1, dtype=float)
    log_beta = math.log(0.5) - 1.0 / k
    # one exponentiation of a log-space cumulative sum
    log_L = np.concatenate([[0.0], np.cumsum(log_beta)])
    beta = np.concatenate([[math.nan], np.exp(log_beta)])
    L = np.exp(log_L)
    log_pi = np.concatenate([[math.nan], log_L[1:] - np.log(16 * k)])
    pi = np.exp(log_pi)
    for arr in (beta, L, pi, log_L, log_pi):
        arr.setflags(write=False)
    return GeomSchedule(k_max, beta, L, pi, log_L, log_pi)


@dataclass(frozen=True, eq=False)
class GeomCube:
    center: np.ndarray
    side: float
    depth: int

    @property
    def lo(self) -> np.ndarray:
        return self.center - self.side / 2

    @property
    def hi(self) -> np.ndarray:
        return self.center + self.side / 2

    def contains(self, x) -> bool:
        return bool(np.all(np.abs(np.asarray(x, float) - self.center) <= self.side / 2))


def child_offsets(n: int) -> np.ndarray:
    """Sign vectors of the ``2**n`` children; row ``i`` belongs to letter ``i + 1``."""
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n)[None, :]) & 1
    return 2.0 * bits - 1.0


def _check_address(address, n: int) -> tuple[int, ...]:
    word = tuple(int(a) for a in address)
    if any(not 1 <= a <= 2 ** n for a in word):
        raise AddressError(f"address {word} has letters outside 1..{2 ** n}")
    return word


def cube_of(address, n: int, sched: GeomSchedule | None = None) -> GeomCube:
    """Centre and side of ``Q(address)``; the empty address is ``Q_0``."""
    word = _check_address(address, n)
    if sched is None:
        sched = schedule(max(len(word) + 1, 1))
    signs = child_offsets(n)
    center = np.zeros(n)
    for k, letter in enumerate(word):
        center = center + signs[letter - 1] * sched.L(k) / 4
    return GeomCube(center, sched.L(len(word)), len(word))


def plateau_geometry(k: int, sched: GeomSchedule) -> tuple[float, float, float]:
    """Half-widths of child, plateau and support cubes for children of a depth-``k`` cube.

    Returns ``(child, plateau, support)`` half-widths; the bump transition
    width is ``support - plateau``.
    """
    L = sched.L(k)
    beta = sched.beta(k + 1)
    margin = (0.25 - beta / 2) * L
    child = beta * L / 2
    return child, child + margin / 3, child + 2 * margin / 3


class Region(str, enum.Enum):
    OUTSIDE = "outside"
    SHELL = "shell"
    PLATEAU = "plateau"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Location:
    """Where a point sits in the cube tree.

    ``address`` is the deepest cube containing the point.  For ``PLATEAU``
    and ``SHELL``, ``child`` is the letter of the quadrant the point sits in;
    only that child's bump can be nonzero there.
    """

    address: tuple[int, ...]
    region: Region
    child: int | None = None


def locate(x, n: int, depth_cap: int, sched: GeomSchedule | None = None) -> Location:
    """Descend the cube tree towards ``x`` until it leaves every child or hits the cap."""
    x = np.asarray(x, dtype=float).reshape(n)
    if np.any(np.abs(x) > 0.5):
        return Location((), Region.OUTSIDE)
    if sched is None:
        sched = schedule(depth_cap + 1)
    center = np.zeros(n)
    weights = 1 << np.arange(n)
    address: list[int] = []
    for k in range(depth_cap):
        L = sched.L(k)
        bits = (x >= center).astype(int)
        child_center = center + (2.0 * bits - 1.0) * L / 4
        half_child, half_plateau, _ = plateau_geometry(k, sched)
        dist = float(np.max(np.abs(x - child_center)))
        letter = 1 + int(bits @ weights)
        if dist > half_child:
            if dist <= half_plateau:
                return Location(tuple(address), Region.PLATEAU, letter)
            return Location(tuple(address), Region.SHELL, letter)
        address.append(letter)
        center = child_center
    return Location(tuple(address), Region.UNDECIDED)


def _box_distance(lo1, hi1, lo2, hi2) -> float:
    gap = np.maximum(0.0, np.maximum(lo1 - hi2, lo2 - hi1))
    return float(np.linalg.norm(gap))


def _boundary_distance(inner_lo, inner_hi, outer_lo, outer_hi) -> float:
    return float(min(np.min(inner_lo - outer_lo), np.min(outer_hi - inner_hi)))


@dataclass(frozen=True)
class SeparationResult:
    k: int
    min_distance: float
    bound: float  # (1/4 - beta_{k+1}/2) * L_k
    pi_k: float

    @property
    def ok(self) -> bool:
        return self.min_distance >= self.bound * (1 - 1e-12) and self.bound >= self.pi_k


def separation_check(k: int, n: int = 1, sched: GeomSchedule | None = None) -> SeparationResult:
    """Smallest boundary distance between distinct cubes of depth at most ``k + 1``.

    Cubes at equal depth are congruent, so one parent per depth suffices:
    its children are measured against each other and against its boundary.
    Each parent is measured in its own frame (centre at the origin), since
    absolute coordinates cannot resolve the tiny distances of deep levels.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if sched is None:
        sched = schedule(k + 1)
    signs = child_offsets(n)
    best = math.inf
    for depth in range(k + 1):
        L, half = sched.L(depth), sched.beta(depth + 1) * sched.L(depth) / 2
        p_lo, p_hi = np.full(n, -L / 2), np.full(n, L / 2)
        kids = [(c - half, c + half) for c in signs * L / 4]
        for i, (a_lo, a_hi) in enumerate(kids):
            best = min(best, _boundary_distance(a_lo, a_hi, p_lo, p_hi))
            for b_lo, b_hi in kids[i + 1:]:
                best = min(best, _box_distance(a_lo, a_hi, b_lo, b_hi))
    bound = (0.25 - sched.beta(k + 1) / 2) * sched.L(k)
    return SeparationResult(k, best, bound, sched.pi(k))
