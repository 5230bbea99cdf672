"""Target-set preparation: exponent sequence, weighted gap sums and block decomposition.

The target ``B`` is split recursively into ``2**n`` closed blocks per level.
Block ``R(a)`` at depth ``k`` must satisfy ``G(R(a)) <= M * 2**(-n*k)``, where
``G`` sums ``|z_m|**(1/s_m)`` over the block's gaps listed longest first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .gapset import GapSet, InconclusiveError, _fit_degree, _trusted, estimate_degree

__all__ = [
    "ExponentSequence",
    "DecompositionNode",
    "DecompositionTree",
    "ConstructionRefused",
    "smoothness_split",
    "choose_s_sequence",
    "weighted_G",
    "decompose",
]

MAX_STAGE = 60


class ConstructionRefused(ValueError):
    """The target cannot carry the construction; ``exponent`` names the failing exponent."""

    def __init__(self, message: str, exponent: float | None = None):
        super().__init__(message)
        self.exponent = exponent


def smoothness_split(s: float, n: int) -> tuple[int, float, float]:
    """``P`` (largest integer below ``s*n``) and the open exponent bracket ``(lo, s)``.

    ``lo = (P + s*n) / (2n)`` keeps ``diam <= G**lo`` valid for every block.
    """
    if not s > 1:
        raise ConstructionRefused(f"s must exceed 1, got {s}")
    if n < 1:
        raise ConstructionRefused(f"dimension must be >= 1, got {n}")
    sn = s * n
    P = math.ceil(sn) - 1
    return P, (P + sn) / (2 * n), s


@dataclass(frozen=True, eq=False)
class ExponentSequence:
    s: float
    n: int
    P: int
    lo: float
    values: np.ndarray  # s_1, s_2, ...; later indices repeat the last value

    @property
    def sn(self) -> float:
        return self.s * self.n

    @property
    def holder_power(self) -> float:
        """``(P + sn) / (2n)``: exponent in ``diam(R) <= G(R)**power``."""
        return (self.P + self.sn) / (2 * self.n)

    def take(self, count: int, start: int = 0) -> np.ndarray:
        idx = np.minimum(np.arange(start, start + count), self.values.size - 1)
        return self.values[idx]

    def at(self, ranks: np.ndarray) -> np.ndarray:
        return self.values[np.minimum(ranks, self.values.size - 1)]

    def to_json(self) -> dict:
        return {"s": self.s, "n": self.n, "P": self.P, "bracket": [self.lo, self.s],
                "values": self.values.tolist()}


def _enumeration(lengths: np.ndarray, positions: np.ndarray) -> np.ndarray:
    # longest first, ties by position
    return np.lexsort((positions, -lengths))


def choose_s_sequence(s: float, n: int, B: GapSet, count: int | None = None) -> ExponentSequence:
    """Nondecreasing exponents in ``(lo, s)`` creeping towards ``s``.

    Stage ``j`` uses ``t_j = s - (s - lo) * 2**-j``.  The stage advances at
    gap ``m`` once the remaining tail ``sum_{m' >= m} |z_m'|**(1/t_{j+1})``
    drops below ``2**-(j+1)``.
    """
    P, lo, hi = smoothness_split(s, n)
    if not B.is_measure_zero():
        raise ConstructionRefused(f"target has positive measure {B.measure():.3g}")
    if count is None:
        count = max(B.n_gaps, 1)
    if B.is_exact:
        values = np.full(count, 0.5 * (lo + hi))
        return ExponentSequence(s, n, P, lo, values)
    _require_degree(B, s)

    lengths = np.sort(B.lengths)[::-1]
    hidden = B.level_rule.hidden_sum if B.level_rule is not None and B.level_rule.depth >= 2 else None
    cache: dict[int, np.ndarray] = {}

    def suffix(j: int) -> np.ndarray:
        if j not in cache:
            t = hi - (hi - lo) * 2.0 ** -j
            terms = lengths ** (1.0 / t)
            tail = np.cumsum(terms[::-1])[::-1]
            extra = hidden(t) if hidden is not None else 0.0
            cache[j] = np.concatenate([tail, [0.0]]) + extra
        return cache[j]

    values = np.empty(count)
    j = 1
    for m in range(count):
        k = min(m, lengths.size)
        while j < MAX_STAGE and suffix(j + 1)[k] < 2.0 ** -(j + 1):
            j += 1
        values[m] = hi - (hi - lo) * 2.0 ** -j
    return ExponentSequence(s, n, P, lo, values)


def _require_degree(B: GapSet, s: float) -> None:
    # the gap series must converge for every exponent below s
    if B.level_rule is not None and B.level_rule.depth >= 2:
        if B.level_rule.term_ratio(s) > 1.0 + 1e-12:
            raise ConstructionRefused(
                f"gap series diverges below s={s}; degree estimate {estimate_degree(B):.6g}",
                exponent=estimate_degree(B))
        return
    try:
        degree = _fit_degree(B)
    except InconclusiveError as exc:
        raise ConstructionRefused(f"cannot certify convergence: {exc}") from exc
    if degree < s:
        raise ConstructionRefused(f"gap series diverges below s={s}", exponent=degree)


def weighted_G(block: GapSet, seq: ExponentSequence) -> float:
    """``sum |z_m|**(1/s_m)`` with the block's gaps enumerated longest first."""
    if block.n_gaps == 0:
        return 0.0
    lengths = block.lengths
    order = _enumeration(lengths, block.gap_lo)
    return math.fsum((lengths[order] ** (1.0 / seq.take(order.size))).tolist())


@dataclass(eq=False)
class DecompositionNode:
    block: GapSet
    r: float
    G: float
    G_global: float  # same sum with exponents indexed by rank in the whole target
    children: tuple["DecompositionNode", ...] = ()

    @property
    def diameter(self) -> float:
        return self.block.diameter

    def summary(self) -> dict:
        return {"hull": [self.block.hull_lo, self.block.hull_hi], "gap_count": self.block.n_gaps,
                "r": self.r, "G": self.G}


@dataclass(eq=False)
class DecompositionTree:
    root: DecompositionNode
    n: int
    depth: int
    seq: ExponentSequence
    M: float = 0.0
    M_by_depth: list[float] = field(default_factory=list)
    M_global: float = 0.0

    def node(self, address) -> DecompositionNode:
        node = self.root
        for letter in address:
            node = node.children[letter - 1]
        return node

    def path(self, address) -> list[DecompositionNode]:
        nodes = [self.root]
        for letter in address:
            nodes.append(nodes[-1].children[letter - 1])
        return nodes

    def levels(self) -> Iterator[tuple[int, list[DecompositionNode]]]:
        """Distinct node objects at each depth (repeated children appear once)."""
        layer = [self.root]
        for k in range(self.depth + 1):
            yield k, layer
            if k == self.depth:
                break
            seen, nxt = set(), []
            for node in layer:
                for child in node.children:
                    if id(child) not in seen:
                        seen.add(id(child))
                        nxt.append(child)
            layer = nxt

    def walk(self, max_depth: int | None = None) -> Iterator[tuple[tuple[int, ...], DecompositionNode]]:
        """Every address with its node, depth first."""
        limit = self.depth if max_depth is None else min(max_depth, self.depth)
        stack = [((), self.root)]
        while stack:
            address, node = stack.pop()
            yield address, node
            if len(address) < limit:
                for i in range(len(node.children), 0, -1):
                    stack.append((address + (i,), node.children[i - 1]))

    def to_json(self, max_depth: int | None = None) -> dict:
        return {
            "n": self.n,
            "depth": self.depth,
            "M": self.M,
            "M_by_depth": self.M_by_depth,
            "M_global": self.M_global,
            "sequence": self.seq.to_json(),
            "nodes": [dict(address=list(a), **node.summary()) for a, node in self.walk(max_depth)],
        }


@dataclass(frozen=True, eq=False)
class _Block:
    lo: float
    hi: float
    glo: np.ndarray
    ghi: np.ndarray
    ranks: np.ndarray
    measure_zero: bool

    def gapset(self, rule=None, tail=None) -> GapSet:
        if tail is None:
            tail = (self.hi - self.lo) - math.fsum((self.ghi - self.glo).tolist()) if self.measure_zero else 0.0
        return _trusted(self.lo, self.hi, self.glo, self.ghi, max(tail, 0.0), rule)

    def slice(self, lo: float, hi: float, a: int, b: int) -> "_Block":
        return _Block(lo, hi, self.glo[a:b], self.ghi[a:b], self.ranks[a:b], self.measure_zero)


def _split(block: _Block, n: int) -> list[_Block]:
    pieces = 2 ** n
    g = block.glo.size
    if g == 0:
        if block.hi == block.lo:
            return [block] * pieces
        edges = np.linspace(block.lo, block.hi, pieces + 1)
        empty = block.glo[:0]
        return [_Block(float(a), float(b), empty, empty, block.ranks[:0], block.measure_zero)
                for a, b in zip(edges[:-1], edges[1:])]
    lengths = block.ghi - block.glo
    cut = np.sort(_enumeration(lengths, block.glo)[: pieces - 1])
    bounds = [block.lo] + [x for i in cut for x in (block.glo[i], block.ghi[i])] + [block.hi]
    starts = [0] + [int(i) + 1 for i in cut]
    stops = [int(i) for i in cut] + [g]
    out = [block.slice(float(bounds[2 * p]), float(bounds[2 * p + 1]), starts[p], stops[p])
           for p in range(len(starts))]
    if len(out) < pieces:
        point = _Block(block.hi, block.hi, block.glo[:0], block.ghi[:0], block.ranks[:0], block.measure_zero)
        out.extend([point] * (pieces - len(out)))
    return out


def decompose(B: GapSet, n: int, depth: int, seq: ExponentSequence) -> DecompositionTree:
    """Split ``B`` into ``2**n`` blocks per level down to ``depth``.

    A block splits at its ``2**n - 1`` longest gaps.  A block with fewer gaps
    splits at all of them and pads with the singleton of its right end; a
    block without gaps is cut into equal pieces (or repeated if it is a point).
    ``M`` is the measured maximum of ``G(R(a)) * 2**(n*k)``.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    order = _enumeration(B.lengths, B.gap_lo)
    ranks = np.empty(B.n_gaps, dtype=np.int64)
    ranks[order] = np.arange(B.n_gaps)
    root_block = _Block(B.hull_lo, B.hull_hi, B.gap_lo, B.gap_hi, ranks, B.is_measure_zero())
    # repeated children are the same _Block object; the block is kept in the
    # memo so its id stays unique
    memo: dict[tuple[int, int], tuple[_Block, DecompositionNode]] = {}

    def make(block: _Block, k: int, is_root: bool = False) -> DecompositionNode:
        key = (id(block), k)
        if key in memo:
            return memo[key][1]
        gs = B if is_root else block.gapset()
        G = weighted_G(gs, seq)
        G_global = math.fsum((gs.lengths ** (1.0 / seq.at(block.ranks))).tolist()) if gs.n_gaps else 0.0
        node = DecompositionNode(gs, gs.hull_lo, G, G_global)
        if k < depth:
            node.children = tuple(make(child, k + 1) for child in _split(block, n))
        memo[key] = (block, node)
        return node

    root = make(root_block, 0, is_root=True)
    tree = DecompositionTree(root, n, depth, seq)
    per_depth, per_depth_global = [], []
    for k, layer in tree.levels():
        scale = 2.0 ** (n * k)
        per_depth.append(max(node.G for node in layer) * scale)
        per_depth_global.append(max(node.G_global for node in layer) * scale)
    tree.M_by_depth = per_depth
    tree.M = max(per_depth)
    tree.M_global = max(per_depth_global)
    return tree
