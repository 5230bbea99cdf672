"""Compact subsets of the line stored as a hull plus the open gaps of the complement.

A ``GapSet`` represents ``[hull_lo, hull_hi]`` minus a finite, sorted list of
disjoint open gaps.  Sets that are really infinite (Cantor sets) are truncated
at some depth; ``tail_bound`` then holds the total length of the gaps that were
left out and an optional :class:`LevelRule` describes the per-level gap
structure so that series over the omitted gaps can be estimated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GapSet",
    "LevelRule",
    "DegreeSum",
    "HolderWitness",
    "GapSetError",
    "InconclusiveError",
    "PiecewiseLinear",
    "make_gapset",
    "cantor_gapset",
    "gap_sum",
    "converges",
    "estimate_degree",
    "image_and_match",
    "holder_quotient",
]

# ratio test: partial sums are declared convergent when every level-to-level
# ratio over the trailing window stays below this threshold
RATIO_THRESHOLD = 1.0 - 1e-3
RATIO_WINDOW = 8
T_CEILING = 1e6


class GapSetError(ValueError):
    """Invalid gap-set data."""


class InconclusiveError(RuntimeError):
    """Not enough gap structure to decide convergence."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LevelRule:
    """Gap counts and lengths per construction level.

    Levels past the listed ones are continued geometrically from the last two
    entries, which is exact for self-similar sets.
    """

    counts: tuple[float, ...]
    lengths: tuple[float, ...]

    def __post_init__(self):
        if len(self.counts) != len(self.lengths) or not self.counts:
            raise GapSetError("level rule needs matching, non-empty counts and lengths")
        if any(c <= 0 for c in self.counts) or any(l <= 0 for l in self.lengths):
            raise GapSetError("level rule entries must be positive")

    @property
    def depth(self) -> int:
        return len(self.counts)

    def ratios(self) -> tuple[float, float]:
        if self.depth < 2:
            raise InconclusiveError("level rule with a single level has no growth ratio")
        return (self.counts[-1] / self.counts[-2], self.lengths[-1] / self.lengths[-2])

    def level_terms(self, t: float, levels: int | None = None) -> np.ndarray:
        """Per-level contributions count_j * length_j**(1/t), extended to ``levels``."""
        counts = np.asarray(self.counts, dtype=float)
        lengths = np.asarray(self.lengths, dtype=float)
        terms = counts * lengths ** (1.0 / t)
        if levels is not None and levels > self.depth:
            q = self.term_ratio(t)
            extra = terms[-1] * q ** np.arange(1, levels - self.depth + 1)
            terms = np.concatenate([terms, extra])
        return terms

    def log_level_terms(self, t: float, levels: int | None = None) -> np.ndarray:
        """Logarithms of :meth:`level_terms`; safe when the terms underflow."""
        logs = np.log(self.counts) + np.log(self.lengths) / t
        if levels is not None and levels > self.depth:
            cr, lr = self.ratios()
            step = math.log(cr) + math.log(lr) / t
            logs = np.concatenate([logs, logs[-1] + step * np.arange(1, levels - self.depth + 1)])
        return logs

    def term_ratio(self, t: float) -> float:
        cr, lr = self.ratios()
        return cr * lr ** (1.0 / t)

    def hidden_sum(self, t: float) -> float:
        """Sum of count*length**(1/t) over all levels beyond the listed ones."""
        q = self.term_ratio(t)
        if q >= 1.0:
            return math.inf
        last = self.counts[-1] * self.lengths[-1] ** (1.0 / t)
        return last * q / (1.0 - q)

    def to_json(self) -> dict:
        return {"counts": list(self.counts), "lengths": list(self.lengths)}


@dataclass(frozen=True, eq=False)
class GapSet:
    hull_lo: float
    hull_hi: float
    gap_lo: np.ndarray
    gap_hi: np.ndarray
    tail_bound: float = 0.0
    level_rule: LevelRule | None = None

    @property
    def n_gaps(self) -> int:
        return int(self.gap_lo.size)

    @property
    def gaps(self) -> list[tuple[float, float]]:
        return list(zip(self.gap_lo.tolist(), self.gap_hi.tolist()))

    @property
    def lengths(self) -> np.ndarray:
        return self.gap_hi - self.gap_lo

    @property
    def diameter(self) -> float:
        return self.hull_hi - self.hull_lo

    @property
    def is_exact(self) -> bool:
        return self.tail_bound == 0.0 and self.level_rule is None

    @property
    def gap_total(self) -> float:
        return math.fsum(self.lengths.tolist())

    def measure(self) -> float:
        """Lebesgue measure, taking ``tail_bound`` as the exact omitted gap length."""
        return max(0.0, self.diameter - self.gap_total - self.tail_bound)

    def is_measure_zero(self, tol: float = 1e-12) -> bool:
        return self.measure() <= tol * max(1.0, self.diameter)

    def components(self) -> tuple[np.ndarray, np.ndarray]:
        """Closed intervals left after removing the represented gaps."""
        lo = np.concatenate([[self.hull_lo], self.gap_hi])
        hi = np.concatenate([self.gap_lo, [self.hull_hi]])
        return lo, hi

    def points(self) -> np.ndarray:
        """Hull and gap endpoints; every one of them lies in the set."""
        return np.concatenate([[self.hull_lo], np.ravel(np.column_stack([self.gap_lo, self.gap_hi])),
                               [self.hull_hi]])

    def contains(self, x: float) -> bool:
        if x < self.hull_lo or x > self.hull_hi:
            return False
        i = int(np.searchsorted(self.gap_lo, x, side="left")) - 1
        return not (i >= 0 and self.gap_lo[i] < x < self.gap_hi[i])

    def to_json(self) -> dict:
        out = {
            "hull": [self.hull_lo, self.hull_hi],
            "gaps": [[a, b] for a, b in self.gaps],
            "tail_bound": self.tail_bound,
        }
        if self.level_rule is not None:
            out["level_rule"] = self.level_rule.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "GapSet":
        try:
            lo, hi = obj["hull"]
            gaps = obj.get("gaps", [])
            tail = float(obj.get("tail_bound", 0.0))
            rule = obj.get("level_rule")
        except (KeyError, TypeError, ValueError) as exc:
            raise GapSetError(f"malformed gap-set JSON: {exc}") from exc
        if rule is not None:
            rule = LevelRule(tuple(float(c) for c in rule["counts"]),
                             tuple(float(l) for l in rule["lengths"]))
        return make_gapset(float(lo), float(hi), gaps, tail, level_rule=rule)


def _trusted(lo: float, hi: float, glo, ghi, tail: float = 0.0,
             rule: LevelRule | None = None) -> GapSet:
    return GapSet(float(lo), float(hi), _frozen(glo), _frozen(ghi), float(tail), rule)


def make_gapset(hull_lo: float, hull_hi: float, gaps: Iterable[Sequence[float]] = (),
                tail_bound: float = 0.0, level_rule: LevelRule | None = None) -> GapSet:
    """Validate and normalise a gap set.

    Gaps are sorted by left endpoint.  Overlapping gaps, gaps sharing an
    endpoint (the shared point would not be in the set), gaps touching the hull,
    and a negative ``tail_bound`` are all rejected.
    """
    if not (math.isfinite(hull_lo) and math.isfinite(hull_hi)) or hull_lo > hull_hi:
        raise GapSetError(f"invalid hull [{hull_lo}, {hull_hi}]")
    if tail_bound < 0 or not math.isfinite(tail_bound):
        raise GapSetError(f"tail_bound must be a finite nonnegative number, got {tail_bound}")
    arr = np.array(list(gaps), dtype=float).reshape(-1, 2)
    if arr.size:
        arr = arr[np.argsort(arr[:, 0], kind="stable")]
        glo, ghi = arr[:, 0], arr[:, 1]
        bad = np.flatnonzero(~(glo < ghi))
        if bad.size:
            raise GapSetError(f"empty or reversed gap {tuple(arr[bad[0]])}")
        if glo[0] <= hull_lo or ghi[-1] >= hull_hi:
            raise GapSetError("gap touches or crosses the hull boundary")
        clash = np.flatnonzero(glo[1:] <= ghi[:-1])
        if clash.size:
            i = clash[0]
            kind = "abutting" if glo[i + 1] == ghi[i] else "overlapping"
            raise GapSetError(f"{kind} gaps {tuple(arr[i])} and {tuple(arr[i + 1])}")
    else:
        glo = ghi = np.empty(0)
    total = math.fsum((ghi - glo).tolist())
    span = hull_hi - hull_lo
    if total + tail_bound > span * (1 + 1e-12) + 1e-15:
        raise GapSetError("gap lengths plus tail_bound exceed the hull length")
    return _trusted(hull_lo, hull_hi, glo, ghi, tail_bound, level_rule)


def cantor_gapset(ratio: float, depth: int, lo: float = 0.0, hi: float = 1.0) -> GapSet:
    """Middle-``ratio`` Cantor set on ``[lo, hi]`` truncated after ``depth`` levels.

    Level ``j`` removes ``2**(j-1)`` gaps of length ``ratio*((1-ratio)/2)**(j-1)``
    (relative to the hull).  The omitted levels have total length
    ``(1-ratio)**depth``, which is stored as ``tail_bound``.
    """
    if not 0 < ratio < 1:
        raise GapSetError("ratio must lie in (0, 1)")
    if depth < 1:
        raise GapSetError("depth must be >= 1")
    span = hi - lo
    keep = (1 - ratio) / 2
    # self-similarity: C_{j+1} = keep*C_j  u  (1 - keep + keep*C_j), already sorted
    glo = np.array([keep])
    ghi = np.array([1 - keep])
    for _ in range(depth - 1):
        glo = np.concatenate([keep * glo, [keep], (1 - keep) + keep * glo])
        ghi = np.concatenate([keep * ghi, [1 - keep], (1 - keep) + keep * ghi])
    counts = tuple(float(2 ** j) for j in range(depth))
    lengths = tuple(span * ratio * keep ** j for j in range(depth))
    return _trusted(lo, hi, lo + span * glo, lo + span * ghi,
                    span * (1 - ratio) ** depth, LevelRule(counts, lengths))


@dataclass(frozen=True)
class DegreeSum:
    exponent: float
    value: float
    truncated: bool
    tail_estimate: float | None = None  # None means unknown

    @property
    def total_estimate(self) -> float | None:
        if self.tail_estimate is None:
            return None
        return self.value + self.tail_estimate


def gap_sum(A: GapSet, t: float) -> DegreeSum:
    """Sum of ``|z|**(1/t)`` over the represented gaps of ``A``."""
    if not t > 0:
        raise GapSetError(f"exponent must be positive, got {t}")
    value = math.fsum((A.lengths ** (1.0 / t)).tolist())
    truncated = A.tail_bound > 0
    if not truncated:
        tail = 0.0
    elif A.level_rule is not None and A.level_rule.depth >= 2:
        tail = A.level_rule.hidden_sum(t)
    else:
        tail = None
    return DegreeSum(float(t), value, truncated, tail)


def _ratio_test(log_terms: np.ndarray) -> bool:
    window = log_terms[-RATIO_WINDOW:]
    return bool(np.all(np.diff(window) < math.log(RATIO_THRESHOLD)))


def converges(A: GapSet, t: float) -> bool:
    """Decide whether ``sum |z|**(1/t)`` converges for the infinite set behind ``A``.

    Exact sets always converge.  Sets with a level rule use the ratio test over
    the trailing levels.  Other sets fall back to the power-law fit of
    :func:`estimate_degree`, which raises :class:`InconclusiveError` when the
    gap data is too thin.
    """
    if not t > 0:
        raise GapSetError(f"exponent must be positive, got {t}")
    if A.is_exact:
        return True
    if A.level_rule is not None:
        levels = max(A.level_rule.depth, RATIO_WINDOW)
        return _ratio_test(A.level_rule.log_level_terms(t, levels))
    return t < _fit_degree(A)


def _fit_degree(A: GapSet) -> float:
    # counting function N(eps) = #{|z| >= eps} ~ eps**(-rho); the series
    # converges iff 1/t > rho, so the degree is 1/rho
    lengths = np.sort(A.lengths)[::-1]
    lengths = lengths[lengths > 0]
    if lengths.size < 32:
        raise InconclusiveError(f"only {lengths.size} gaps; need at least 32 for a trend")
    x = np.log(lengths[0] / lengths)
    if x[-1] < RATIO_WINDOW * math.log(2):
        raise InconclusiveError("gap lengths span less than 8 dyadic scales")
    y = np.log(np.arange(1, lengths.size + 1))
    deep = x >= x[-1] / 2
    # use the largest rank at each distinct length so staircases fit their corners
    xs, idx = np.unique(np.round(x[deep][::-1], 6), return_index=True)
    ys = y[deep][::-1][idx]
    if xs.size < 3:
        raise InconclusiveError("too few distinct gap scales")
    slope = np.polyfit(xs, ys, 1)[0]
    if slope <= 0:
        return math.inf
    return float(1.0 / slope)


def estimate_degree(A: GapSet, tol: float = 1e-3) -> float:
    """Estimate the supremum of ``t`` for which ``sum |z|**(1/t)`` stays bounded.

    Returns ``math.inf`` when every tested ``t`` converges, which is the case
    for finite sets.
    """
    if A.is_exact:
        return math.inf
    if A.level_rule is None:
        return _fit_degree(A)
    if not converges(A, 1e-3):
        return 0.0
    lo, hi = 1e-3, 1.0
    while converges(A, hi):
        lo, hi = hi, hi * 2
        if hi > T_CEILING:
            return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if converges(A, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Continuous piecewise-linear function through sorted breakpoints."""

    xs: np.ndarray
    ys: np.ndarray

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise GapSetError("need at least two matching breakpoints")
        if np.any(np.diff(x) <= 0):
            raise GapSetError("breakpoints must be strictly increasing")
        object.__setattr__(self, "xs", _frozen(x))
        object.__setattr__(self, "ys", _frozen(y))

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.xs[0]), float(self.xs[-1])

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)

    def range_on(self, a: float, b: float) -> tuple[float, float]:
        inner = self.ys[(self.xs > a) & (self.xs < b)]
        vals = np.concatenate([[self(a), self(b)], inner])
        return float(vals.min()), float(vals.max())


def _image(f: PiecewiseLinear, A: GapSet) -> GapSet:
    comp_lo, comp_hi = A.components()
    spans = sorted(f.range_on(a, b) for a, b in zip(comp_lo.tolist(), comp_hi.tolist()))
    merged = [list(spans[0])]
    for lo, hi in spans[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    glo = [merged[i][1] for i in range(len(merged) - 1)]
    ghi = [merged[i + 1][0] for i in range(len(merged) - 1)]
    lo, hi = merged[0][0], merged[-1][1]
    gap_total = math.fsum(g2 - g1 for g1, g2 in zip(glo, ghi))
    tail = (hi - lo) - gap_total if A.tail_bound > 0 else 0.0
    return _trusted(lo, hi, glo, ghi, max(tail, 0.0))


def image_and_match(f: PiecewiseLinear, A: GapSet) -> tuple[GapSet, dict[int, int]]:
    """Image ``B = f(A)`` and an injective map from gaps of ``B`` to gaps of ``A``.

    Each gap ``z`` of ``B`` is matched to a gap ``(x, x')`` of ``A`` whose
    endpoint images straddle it.  Gaps of ``B`` are handled longest first and
    take the leftmost free candidate; when every candidate is taken an
    augmenting path reassigns earlier choices.

    Returns ``(B, gamma)`` where ``gamma[i] = j`` maps gap ``i`` of ``B`` to gap
    ``j`` of ``A`` (indices into the sorted gap lists).
    """
    a, b = f.domain
    if A.hull_lo < a or A.hull_hi > b:
        raise GapSetError(f"set hull [{A.hull_lo}, {A.hull_hi}] lies outside the domain [{a}, {b}]")
    B = _image(f, A)
    if B.n_gaps == 0:
        return B, {}
    fl = f(A.gap_lo)
    fr = f(A.gap_hi)
    low, high = np.minimum(fl, fr), np.maximum(fl, fr)
    candidates = [np.flatnonzero((low <= u) & (high >= v)).tolist()
                  for u, v in zip(B.gap_lo.tolist(), B.gap_hi.tolist())]
    order = sorted(range(B.n_gaps), key=lambda i: (-(B.gap_hi[i] - B.gap_lo[i]), B.gap_lo[i]))
    owner: dict[int, int] = {}  # A-gap -> B-gap

    def assign(i: int, seen: set[int]) -> bool:
        for j in candidates[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in owner or assign(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in order:
        if not assign(i, set()):
            raise GapSetError(f"no free gap of A straddles gap {B.gaps[i]} of the image")
    return B, {i: j for j, i in owner.items()}


@dataclass(frozen=True)
class HolderWitness:
    exponent: float
    modulus: float
    pair: tuple | None = None


def holder_quotient(samples: Sequence[tuple], k: float, chunk: int = 2048) -> HolderWitness:
    """Largest ``|psi(b) - psi(b')|**k / |b - b'|`` over all sample pairs.

    ``samples`` is a sequence of ``(point, value)``; points and values may be
    scalars or vectors.
    """
    if len(samples) < 2:
        raise GapSetError("need at least two samples")
    if not k > 0:
        raise GapSetError("exponent must be positive")
    pts = np.array([np.atleast_1d(p) for p, _ in samples], dtype=float)
    vals = np.array([np.atleast_1d(v) for _, v in samples], dtype=float)
    best, pair = 0.0, None
    for start in range(0, len(pts), chunk):
        p, v = pts[start:start + chunk], vals[start:start + chunk]
        dx = np.linalg.norm(p[:, None, :] - pts[None, :, :], axis=-1)
        dv = np.linalg.norm(v[:, None, :] - vals[None, :, :], axis=-1)
        clash = (dx == 0) & (dv > 0)
        if clash.any():
            i, j = np.argwhere(clash)[0]
            raise GapSetError(f"not a function: point {pts[start + i]} has two values")
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(dx > 0, dv ** k / dx, 0.0)
        i, j = np.unravel_index(int(np.argmax(q)), q.shape)
        if q[i, j] > best:
            best = float(q[i, j])
            pair = (samples[start + i][0], samples[j][0])
    return HolderWitness(float(k), best, pair)
