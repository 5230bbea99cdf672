"""Hilbert-type space-filling curve ``[0, 1] -> [0, 1]**n`` on dyadic grids.

Level-``n*s`` dyadic intervals of the parameter map onto level-``s`` dyadic
cubes; interval ``index`` goes to the cube with the same Hilbert index.  The
codec is Skilling's transpose algorithm, vectorised over numpy ``uint64``.

Orientation: the curve starts at the origin.  At level 1 in two dimensions the
quadrants are visited in the order (0,0), (0,1), (1,1), (1,0) in
``(x0, x1)`` corner coordinates, so the curve ends at the vertex (1, 0).
In one dimension the curve is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gapset import HolderWitness

__all__ = [
    "DyadicCube",
    "DyadicInterval",
    "CurveError",
    "max_level",
    "index_to_corner",
    "corner_to_index",
    "curve_point",
    "curve_points",
    "interval_to_cube",
    "cube_preimage",
    "dn_constant",
    "dn_check",
]

WORD_BITS = 62


class CurveError(ValueError):
    pass


def max_level(n: int) -> int:
    """Deepest cube level whose interval indices fit in 62 bits."""
    if n < 1:
        raise CurveError("dimension must be >= 1")
    return WORD_BITS // n


@dataclass(frozen=True)
class DyadicCube:
    n: int
    level: int
    corner: tuple[int, ...]  # integer corner, in units of 2**-level

    def __post_init__(self):
        if len(self.corner) != self.n or self.level < 0:
            raise CurveError(f"bad cube {self}")
        if any(c < 0 or c >= 1 << self.level for c in self.corner):
            raise CurveError(f"cube corner {self.corner} outside [0, 1]^{self.n}")

    @property
    def side(self) -> float:
        return 2.0 ** -self.level

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array(self.corner, dtype=float) * self.side
        return lo, lo + self.side

    def contains_cube(self, other: "DyadicCube") -> bool:
        if other.level < self.level:
            return False
        shift = other.level - self.level
        return tuple(c >> shift for c in other.corner) == self.corner


@dataclass(frozen=True)
class DyadicInterval:
    level: int
    index: int

    def __post_init__(self):
        if self.level < 0 or not 0 <= self.index < 1 << self.level:
            raise CurveError(f"bad dyadic interval {self}")

    @property
    def bounds(self) -> tuple[float, float]:
        w = 2.0 ** -self.level
        return self.index * w, (self.index + 1) * w


def _check_level(n: int, level: int) -> None:
    if level < 0 or level > max_level(n):
        raise CurveError(f"level {level} exceeds the cap {max_level(n)} for n={n}")


def _transpose_to_axes(X: np.ndarray, bits: int) -> np.ndarray:
    n = X.shape[0]
    if bits == 0:
        return X
    N = np.uint64(2) << np.uint64(bits - 1)
    # gray decode
    t = X[n - 1] >> np.uint64(1)
    for i in range(n - 1, 0, -1):
        X[i] ^= X[i - 1]
    X[0] ^= t
    Q = np.uint64(2)
    while Q != N:
        P = Q - np.uint64(1)
        for i in range(n - 1, -1, -1):
            hit = (X[i] & Q) != 0
            X[0] = np.where(hit, X[0] ^ P, X[0])
            t = np.where(hit, np.uint64(0), (X[0] ^ X[i]) & P)
            X[0] ^= t
            X[i] ^= t
        Q <<= np.uint64(1)
    return X


def _axes_to_transpose(X: np.ndarray, bits: int) -> np.ndarray:
    n = X.shape[0]
    if bits == 0:
        return X
    M = np.uint64(1) << np.uint64(bits - 1)
    Q = M
    while Q > 1:
        P = Q - np.uint64(1)
        for i in range(n):
            hit = (X[i] & Q) != 0
            X[0] = np.where(hit, X[0] ^ P, X[0])
            t = np.where(hit, np.uint64(0), (X[0] ^ X[i]) & P)
            X[0] ^= t
            X[i] ^= t
        Q >>= np.uint64(1)
    for i in range(1, n):
        X[i] ^= X[i - 1]
    t = np.zeros_like(X[0])
    Q = M
    while Q > 1:
        t = np.where((X[n - 1] & Q) != 0, t ^ (Q - np.uint64(1)), t)
        Q >>= np.uint64(1)
    X ^= t
    return X


def _unpack(h: np.ndarray, n: int, bits: int) -> np.ndarray:
    # index bits, most significant first, are dealt round-robin to X[0..n-1]
    X = np.zeros((n, h.size), dtype=np.uint64)
    for b in range(bits):
        for i in range(n):
            shift = np.uint64((bits - 1 - b) * n + (n - 1 - i))
            bit = (h >> shift) & np.uint64(1)
            X[i] |= bit << np.uint64(bits - 1 - b)
    return X


def _pack(X: np.ndarray, bits: int) -> np.ndarray:
    n = X.shape[0]
    h = np.zeros(X.shape[1], dtype=np.uint64)
    for b in range(bits):
        for i in range(n):
            bit = (X[i] >> np.uint64(bits - 1 - b)) & np.uint64(1)
            h |= bit << np.uint64((bits - 1 - b) * n + (n - 1 - i))
    return h


def index_to_corner(n: int, level: int, index) -> np.ndarray:
    """Integer corners (shape ``(m, n)``) of the level-``level`` cubes with the given indices."""
    _check_level(n, level)
    h = np.atleast_1d(np.asarray(index, dtype=np.uint64))
    if n == 1:
        return h.reshape(-1, 1).astype(np.int64)
    X = _transpose_to_axes(_unpack(h, n, level), level)
    return X.T.astype(np.int64)


def corner_to_index(n: int, level: int, corner) -> np.ndarray:
    """Inverse of :func:`index_to_corner`; ``corner`` has shape ``(m, n)``."""
    _check_level(n, level)
    X = np.atleast_2d(np.asarray(corner, dtype=np.uint64)).T.copy()
    if X.shape[0] != n:
        raise CurveError(f"corner has {X.shape[0]} coordinates, expected {n}")
    if n == 1:
        return X[0].astype(np.uint64)
    return _pack(_axes_to_transpose(X, level), level)


def _shared_vertex(n: int, level: int, child_index: np.ndarray) -> np.ndarray:
    # the vertex of a level-`level` cube that is also a vertex of the given child
    child = index_to_corner(n, level + 1, child_index)
    parent = child >> 1
    return (parent + (child - 2 * parent)) * 2.0 ** -level


def curve_points(n: int, t, depth: int) -> np.ndarray:
    """Vectorised :func:`curve_point`; ``t`` is an array, result has shape ``(m, n)``."""
    if depth < 1 or depth + 1 > max_level(n):
        raise CurveError(f"depth must lie in [1, {max_level(n) - 1}] for n={n}")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any((t < 0) | (t > 1)) or np.any(~np.isfinite(t)):
        raise CurveError("curve parameter outside [0, 1]")
    count = 1 << (n * depth)
    u = t * float(count)
    fl = np.floor(u)
    h = np.minimum(fl.astype(np.uint64), np.uint64(count - 1))
    theta = np.where(t == 1.0, 1.0, u - fl)[:, None]
    step = np.uint64(1 << n)
    entry = _shared_vertex(n, depth, h * step)
    last = h == np.uint64(count - 1)
    # exit vertex of cube h: entry of cube h+1, or the vertex shared with its last child
    nxt = np.where(last, h * step + (step - np.uint64(1)), (h + np.uint64(1)) * step)
    exit_ = _shared_vertex(n, depth, nxt)
    return entry + theta * (exit_ - entry)


def curve_point(n: int, t: float, depth: int) -> np.ndarray:
    """Point of the curve at parameter ``t``, resolved to cube level ``depth``.

    The value is exact at dyadic parameters ``h * 2**(-n*depth)`` (cube entry
    vertices) and linearly interpolated in between, so it lies in the same
    level-``depth`` cube as the limit curve: error at most ``sqrt(n) * 2**-depth``.
    """
    return curve_points(n, [t], depth)[0]


def interval_to_cube(n: int, alpha: DyadicInterval) -> DyadicCube:
    """The level-``s`` cube containing the image of a level-``n*s`` interval."""
    if alpha.level % n:
        raise CurveError(f"interval level {alpha.level} is not divisible by n={n}")
    s = alpha.level // n
    corner = index_to_corner(n, s, alpha.index)[0]
    return DyadicCube(n, s, tuple(int(c) for c in corner))


def cube_preimage(n: int, delta: DyadicCube) -> DyadicInterval:
    """The level-``n*s`` interval whose image is the cube ``delta``."""
    if delta.n != n:
        raise CurveError("cube dimension mismatch")
    index = int(corner_to_index(n, delta.level, [delta.corner])[0])
    return DyadicInterval(n * delta.level, index)


def dn_constant(n: int) -> float:
    """The modulus ``2**(2n) * n**(n/2)`` of a cube-preserving curve."""
    return 2.0 ** (2 * n) * n ** (n / 2)


def dn_check(n: int, pair_count: int, seed: int = 0, depth: int | None = None) -> HolderWitness:
    """Largest ``|f(b) - f(a)|**n / |b - a|`` over random parameter pairs.

    Half the pairs are uniform on ``[0, 1]**2``; the other half are close pairs
    with separations spread log-uniformly down to the resolution of the curve.
    """
    if pair_count < 1:
        raise CurveError("pair_count must be >= 1")
    if depth is None:
        depth = min(max_level(n) - 1, 20)
    rng = np.random.default_rng(seed)
    far = pair_count // 2
    a = rng.random(pair_count)
    b = np.empty(pair_count)
    b[:far] = rng.random(far)
    finest = n * depth
    gap = 2.0 ** -rng.uniform(1, finest, pair_count - far)
    sign = rng.choice([-1.0, 1.0], pair_count - far)
    b[far:] = np.clip(a[far:] + sign * gap, 0.0, 1.0)
    fa = curve_points(n, a, depth)
    fb = curve_points(n, b, depth)
    dist = np.abs(b - a)
    num = np.linalg.norm(fb - fa, axis=1) ** n
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(dist > 0, num / dist, 0.0)
    i = int(np.argmax(q))
    return HolderWitness(float(n), float(q[i]), (float(a[i]), float(b[i])))
