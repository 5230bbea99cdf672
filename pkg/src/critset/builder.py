"""Assembly, evaluation and verification of the smooth function ``f``.

On a cube ``Q(a)`` of depth ``k`` with children ``Q_i`` the function is
``f = r(a) + sum_i (r(a, i) - r(a)) * h_i``, where ``h_i`` is the plateau bump
around ``Q_i``.  Inside ``Q_i`` the same rule applies one level down, so ``f``
is defined by descending the cube tree.  The descent stops at depth
``depth + 1``; points still inside a cube there are reported with the value
``r`` of that cube and an error bound of its block diameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cantor import GeomSchedule, Region, cube_of, locate, plateau_geometry, schedule
from .gapset import GapSet
from .plateau import PlateauSpec, bump_derivative, bump_jet, plateau_bounds, plateau_spec, ramp_jet
from .target import DecompositionTree, ExponentSequence, choose_s_sequence, decompose

__all__ = [
    "ConstructionParams",
    "EvalResult",
    "DerivativeResult",
    "ReportEntry",
    "VerificationReport",
    "TiledFunction",
    "build",
    "eval_f",
    "eval_grad",
    "sigma",
    "sigma_table",
    "verify_construction",
    "tile_assembly",
    "grid_rows",
]

# sigma is tabulated this far to bound its tail beyond the evaluation cap
SIGMA_HORIZON = 2000
FLAT_TOL = 1e-12
FD_TOL = 1e-4
REFINE_STEPS = 60


@dataclass(frozen=True, eq=False)
class ConstructionParams:
    n: int
    s: float
    P: int
    seq: ExponentSequence
    tree: DecompositionTree
    sched: GeomSchedule
    depth: int
    plateau: PlateauSpec
    target: GapSet

    @property
    def sn(self) -> float:
        return self.s * self.n

    @property
    def cap(self) -> int:
        """Deepest cube level resolved by evaluation."""
        return self.depth + 1

    @property
    def tau(self) -> float:
        return self.seq.holder_power

    @property
    def M(self) -> float:
        return self.tree.M

    def M_prime(self, p: int) -> float:
        """``M_p * M**tau``: constant in ``||D^p f|| <= M'_p sigma_p(k)`` on depth-``k`` shells."""
        return self.plateau.M[p] * self.M ** self.tau

    def constants(self) -> dict:
        return {
            "n": self.n, "s": self.s, "P": self.P, "depth": self.depth, "tau": self.tau,
            "M": self.M, "M_global": self.tree.M_global, "M_by_depth": self.tree.M_by_depth,
            "M_p": list(self.plateau.M),
            "M_prime_p": [self.M_prime(p) for p in range(self.plateau.p_max + 1)],
            "profile_sups": list(self.plateau.profile),
        }


def build(target: GapSet, n: int, s: float, depth: int) -> ConstructionParams:
    """Prepare the exponent sequence, block tree, geometry and bump constants.

    Raises :class:`~critset.target.ConstructionRefused` when the target is
    not measure zero or its gap series does not converge below ``s``.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    seq = choose_s_sequence(s, n, target)
    tree = decompose(target, n, depth + 1, seq)
    sched = schedule(max(SIGMA_HORIZON, depth + 3))
    spec = plateau_spec(n, seq.P + 1, sched)
    return ConstructionParams(n, s, seq.P, seq, tree, sched, depth, spec, target)


@dataclass(frozen=True)
class EvalResult:
    value: float
    error_bound: float
    region: str
    depth: int


@dataclass(frozen=True, eq=False)
class DerivativeResult:
    tensor: np.ndarray
    error_bound: float
    region: str
    depth: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.tensor))


def _as_point(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != n:
        raise ValueError(f"expected a point with {n} coordinates, got {x.size}")
    return x


def _shell_bump(x: np.ndarray, params: ConstructionParams, address: tuple, letter: int, order: int):
    k = len(address)
    child = cube_of(address + (letter,), params.n, params.sched)
    _, plateau, support = plateau_geometry(k, params.sched)
    return bump_jet(x, child.center, plateau, support, order)


def eval_f(x, params: ConstructionParams) -> EvalResult:
    x = _as_point(x, params.n)
    loc = locate(x, params.n, params.cap, params.sched)
    depth = len(loc.address)
    if loc.region is Region.OUTSIDE:
        return EvalResult(params.tree.root.r, 0.0, loc.region.value, 0)
    node = params.tree.node(loc.address)
    if loc.region is Region.UNDECIDED:
        return EvalResult(node.r, node.diameter, loc.region.value, depth)
    r_child = node.children[loc.child - 1].r
    if loc.region is Region.PLATEAU:
        return EvalResult(r_child, 0.0, loc.region.value, depth)
    h = float(np.prod(_shell_bump(x, params, loc.address, loc.child, 0)[0]))
    return EvalResult(node.r + (r_child - node.r) * h, 0.0, loc.region.value, depth)


def sigma(t: float, k: int, params: ConstructionParams) -> float:
    """``2**(-(sn + t) k / 2) * pi_{k+1}**(-t)``, evaluated in log space."""
    params.sched.pi(k + 1)  # range check
    log = -(params.sn + t) * k / 2 * math.log(2) - t * float(params.sched.log_pi_table[k + 1])
    return math.exp(log)


def sigma_table(t: float, params: ConstructionParams, k_max: int | None = None) -> np.ndarray:
    if k_max is None:
        k_max = params.sched.k_max - 1
    k = np.arange(k_max + 1)
    log_pi = params.sched.log_pi_table[1:k_max + 2]
    return np.exp(-(params.sn + t) * k / 2 * math.log(2) - t * log_pi)


def _tail_sigma(p: int, k: int, params: ConstructionParams) -> float:
    # sup_{j >= k} sigma_p(j) over the tabulated horizon; sigma_p decreases past it
    table = sigma_table(p, params)
    return float(table[min(k, table.size - 1):].max())


def _derivative(x: np.ndarray, params: ConstructionParams, p: int) -> DerivativeResult:
    n = params.n
    loc = locate(x, n, params.cap, params.sched)
    depth = len(loc.address)
    zero = np.zeros((n,) * p)
    if loc.region is Region.UNDECIDED:
        bound = params.M_prime(min(p, params.plateau.p_max)) * _tail_sigma(p, params.cap, params)
        return DerivativeResult(zero, bound, loc.region.value, depth)
    if loc.region is not Region.SHELL:
        return DerivativeResult(zero, 0.0, loc.region.value, depth)
    node = params.tree.node(loc.address)
    jump = node.children[loc.child - 1].r - node.r
    jet = _shell_bump(x, params, loc.address, loc.child, p)
    return DerivativeResult(jump * bump_derivative(jet, p), 0.0, loc.region.value, depth)


def eval_grad(x, params: ConstructionParams, p: int = 1) -> DerivativeResult:
    """Order-``p`` derivative tensor of ``f`` at ``x`` (shape ``(n,) * p``), ``1 <= p <= P``.

    At points still inside a cube at the evaluation cap the tensor is zero
    and ``error_bound`` is ``M'_p * sup_{j >= cap} sigma_p(j)``.
    """
    if not 1 <= p <= params.P:
        raise ValueError(f"derivative order must lie in [1, P={params.P}], got {p}")
    return _derivative(_as_point(x, params.n), params, p)


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class ReportEntry:
    name: str
    bound: float
    measured: float
    passed: bool
    witness: list | None = None
    detail: dict | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "bound": self.bound, "measured": self.measured, "pass": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass
class VerificationReport:
    constants: dict
    config: dict
    entries: list[ReportEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[ReportEntry]:
        return [e for e in self.entries if not e.passed]

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "constants": self.constants,
            "entries": [e.to_json() for e in self.entries],
            "pass": self.passed,
        }


def _entry(name: str, bound: float, measured: float, witness=None, detail=None, slack: float = 0.0) -> ReportEntry:
    ok = bool(np.isfinite(measured)) and measured <= bound * (1 + slack)
    wit = None if witness is None else [float(v) for v in np.atleast_1d(witness)]
    return ReportEntry(name, float(bound), float(measured), ok, wit, detail)


def _ratio(num: float, den: float) -> float:
    # 0/0 counts as satisfied; anything else over 0 as violated
    if den > 0:
        return num / den
    return 0.0 if num <= 0 else math.inf


def _leaves(params: ConstructionParams) -> list[tuple[tuple[int, ...], object]]:
    # one address per distinct node at the cap
    seen, out = set(), []
    for address, node in params.tree.walk():
        if len(address) == params.cap and id(node) not in seen:
            seen.add(id(node))
            out.append((address, node))
    return out


def _structural(params: ConstructionParams) -> list[ReportEntry]:
    n, tree = params.n, params.tree
    entries = []

    # nesting and representatives over every distinct block
    worst_nest, worst_rep, nest_wit, rep_wit = 0.0, 0.0, None, None
    for _, layer in tree.levels():
        for node in layer:
            b = node.block
            rep = abs(node.r - b.hull_lo) + (0.0 if b.contains(node.r) else 1.0)
            if rep > worst_rep:
                worst_rep, rep_wit = rep, [b.hull_lo, b.hull_hi]
            for child in node.children:
                c = child.block
                excess = max(b.hull_lo - c.hull_lo, c.hull_hi - b.hull_hi, 0.0)
                if excess > worst_nest:
                    worst_nest, nest_wit = excess, [c.hull_lo, c.hull_hi]
    entries.append(_entry("nesting", 0.0, worst_nest, nest_wit))
    entries.append(_entry("representative", 0.0, worst_rep, rep_wit))

    # diam(R) <= G(R)**tau <= (M 2^{-nk})**tau; M measured, so the second link is its definition
    worst, wit = 0.0, None
    for k, layer in tree.levels():
        cap = (tree.M * 2.0 ** (-n * k)) ** params.tau
        for node in layer:
            lhs = node.diameter
            g_pow = node.G ** params.tau
            excess = _ratio(max(lhs - g_pow, g_pow - cap, 0.0), cap)
            if excess > worst:
                worst, wit = excess, [k, node.block.hull_lo, node.block.hull_hi]
    entries.append(_entry("diameter_chain", 1e-12, worst, wit))
    entries.append(_entry("M_finite", math.inf, tree.M if np.isfinite(tree.M) else math.inf,
                          detail={"M_global": tree.M_global}))

    # mapping and prescription: f at one point of each cap-depth cube equals r(a) exactly
    leaves = _leaves(params)
    worst_map, worst_pres, map_wit = 0.0, 0.0, None
    values = []
    for address, node in leaves:
        x = cube_of(address, n, params.sched).center
        res = eval_f(x, params)
        values.append(res.value)
        worst_pres = max(worst_pres, abs(res.value - node.r))
        for anc in tree.path(address):
            b = anc.block
            excess = max(b.hull_lo - res.value, res.value - b.hull_hi, 0.0)
            if excess > worst_map:
                worst_map, map_wit = excess, list(x)
    entries.append(_entry("mapping", 0.0, worst_map, map_wit, {"cubes": len(leaves)}))
    entries.append(_entry("prescription", 0.0, worst_pres))

    # coverage: every block endpoint at depth d lies within that block's diameter of a value of f
    achieved = np.sort(np.asarray(values))
    depth_d = next(layer for k, layer in tree.levels() if k == params.depth)
    worst_cov, cov_wit, checked = 0.0, None, 0
    for nd in depth_d:
        for e in (nd.block.hull_lo, nd.block.hull_hi):
            i = int(np.searchsorted(achieved, e))
            near = min(abs(achieved[j] - e) for j in (i - 1, i) if 0 <= j < achieved.size)
            checked += 1
            excess = max(near - nd.diameter, 0.0)
            if excess > worst_cov or cov_wit is None:
                worst_cov, cov_wit = excess, [e, near, nd.diameter]
    entries.append(_entry("coverage", 0.0, worst_cov, cov_wit, {"endpoints": checked}))

    # bump constants at the first and last resolved depths
    for k in sorted({0, params.depth}):
        bounds, overlap = plateau_bounds(params.plateau, k, params.sched, points=2500 if n > 1 else 10_000)
        for b in bounds:
            entries.append(_entry(f"plateau_bound_k{k}_p{b.p}", b.bound, b.measured))
        entries.append(_entry(f"plateau_overlap_k{k}", 1.0, overlap, slack=1e-12))
    return entries


def _random_address(rng: np.random.Generator, n: int, k: int) -> tuple[int, ...]:
    return tuple(int(a) for a in rng.integers(1, 2 ** n + 1, size=k))


def _transition_point(rng: np.random.Generator, params: ConstructionParams, k: int):
    """A point in the transition ring of a random child of a random depth-``k`` cube."""
    n = params.n
    address = _random_address(rng, n, k)
    letter = int(rng.integers(1, 2 ** n + 1))
    child = cube_of(address + (letter,), n, params.sched)
    _, plateau, support = plateau_geometry(k, params.sched)
    dist = rng.uniform(plateau, support)
    x = child.center + rng.uniform(-dist, dist, size=n)
    axis = int(rng.integers(n))
    x[axis] = child.center[axis] + dist * rng.choice([-1.0, 1.0])
    return x, address


def _boundary_point(rng: np.random.Generator, params: ConstructionParams, k: int) -> np.ndarray:
    n = params.n
    cube = cube_of(_random_address(rng, n, k), n, params.sched)
    x = cube.center + rng.uniform(-cube.side / 2, cube.side / 2, size=n)
    axis = int(rng.integers(n))
    x[axis] = cube.center[axis] + rng.choice([-1.0, 1.0]) * cube.side / 2
    return x


def _sampled(params: ConstructionParams, budget: int, rng: np.random.Generator) -> list[ReportEntry]:
    n, d, P, tree = params.n, params.depth, params.P, params.tree
    share = max(budget // 8, 1)
    entries = []

    # shell derivative bounds: |D^p f| <= M_p pi^{-p} |r_i - r| <= M_p pi^{-p} diam <= M'_p sigma_p(k)
    link1 = link2 = 0.0
    wit1 = wit2 = None
    for _ in range(share):
        k = int(rng.integers(0, d + 1))
        x, address = _transition_point(rng, params, k)
        node = tree.node(address)
        for p in range(1, P + 1):
            got = _derivative(x, params, p)
            if got.region != Region.SHELL.value or got.depth != k:
                continue
            scale = params.plateau.M[p] * params.sched.pi(k + 1) ** -p
            q1 = _ratio(got.norm, scale * node.diameter)
            q2 = _ratio(scale * node.diameter, params.M_prime(p) * sigma(p, k, params))
            if q1 > link1:
                link1, wit1 = q1, x
            if q2 > link2:
                link2, wit2 = q2, x
    entries.append(_entry("shell_derivative_vs_diameter", 1.0, link1, wit1))
    entries.append(_entry("shell_diameter_vs_sigma", 1.0, link2, wit2, slack=1e-12))

    # derivative vanishing near the depth-d Cantor approximation
    bound = params.M_prime(1) * sigma(1, d, params)
    worst, wit, undecided_err = 0.0, None, 0.0
    for i in range(2 * share):
        if i % 2:
            x, _ = _transition_point(rng, params, d)
        else:
            cube = cube_of(_random_address(rng, n, d), n, params.sched)
            x = cube.center + rng.uniform(-cube.side / 2, cube.side / 2, size=n)
        got = _derivative(x, params, 1)
        undecided_err = max(undecided_err, got.error_bound)
        if got.norm > worst:
            worst, wit = got.norm, x
    entries.append(_entry("derivative_vanishing", bound, worst, wit,
                          {"cap_truncation_bound": undecided_err}))

    # rank: D f = 0 at points of the cap-depth Cantor approximation
    worst, wit = 0.0, None
    for _ in range(share):
        cube = cube_of(_random_address(rng, n, params.cap), n, params.sched)
        x = cube.center + rng.uniform(-cube.side / 2, cube.side / 2, size=n)
        got = _derivative(x, params, 1)
        if got.norm > worst or wit is None:
            worst, wit = got.norm, x
    entries.append(_entry("rank", 0.0, worst, wit))

    # Hoelder ledger of D^P f: constant calibrated on shallow shells, checked on deep ones.
    # Random pairs seed a local search, since the sup sits on a thin set of pairs.
    ts = [P + 0.1, (P + params.sn) / 2]
    per_k = max(share // max(d + 1, 1), 4)
    quotients = {t: np.zeros(d + 1) for t in ts}
    witnesses = {t: [None] * (d + 1) for t in ts}

    def quotient(x, y, t):
        diff = np.linalg.norm(_derivative(x, params, P).tensor - _derivative(y, params, P).tensor)
        dist = float(np.linalg.norm(y - x))
        return diff / dist ** (t - P) if dist > 0 else 0.0

    for k in range(d + 1):
        _, plateau, support = plateau_geometry(k, params.sched)
        width = support - plateau
        pairs = []
        for _ in range(per_k):
            x, _ = _transition_point(rng, params, k)
            step = width * 10.0 ** rng.uniform(-2, 0.5)
            direction = rng.normal(size=n)
            pairs.append((x, x + step * direction / np.linalg.norm(direction)))
        for t in ts:
            scored = sorted(((quotient(x, y, t), i) for i, (x, y) in enumerate(pairs)), reverse=True)
            best, i = scored[0]
            bx, by = pairs[i]
            for _ in range(REFINE_STEPS):
                jitter = rng.normal(scale=0.02 * width, size=(2, n))
                cx, cy = bx + jitter[0], by + jitter[1]
                q = quotient(cx, cy, t)
                if q > best:
                    best, bx, by = q, cx, cy
            quotients[t][k], witnesses[t][k] = best, np.concatenate([bx, by])
    split = d // 2
    for t in ts:
        sig = np.array([sigma(t, k + 1, params) for k in range(d + 1)])
        ratio = np.array([_ratio(q, g) for q, g in zip(quotients[t], sig)])
        M2 = float(ratio[: split + 1].max())
        deep = ratio[split + 1:]
        worst = float(deep.max()) if deep.size else 0.0
        kw = split + 1 + int(np.argmax(deep)) if deep.size else None
        entries.append(_entry(f"holder_t{t:.4g}", M2, worst,
                              None if kw is None else witnesses[t][kw],
                              {"M_double_prime": M2, "calibration_depths": split + 1,
                               "quotients": quotients[t].tolist(), "sigma": sig.tolist()}))

    # boundary flatness: every derivative up to p_max vanishes on cube boundaries
    worst, wit = 0.0, None
    for _ in range(share):
        k = int(rng.integers(1, params.cap + 1))
        x = _boundary_point(rng, params, k)
        for p in range(1, params.plateau.p_max + 1):
            got = _derivative(x, params, p)
            if got.norm > worst or wit is None:
                worst, wit = got.norm, x
    entries.append(_entry("boundary_flatness", FLAT_TOL, worst, wit))

    # continuity: |f(x) - f(x')| <= diam(R(a_k)) <= M^tau sigma_P(k) pi_{k+1}^P for x, x' in Q(a_k)
    worst1 = worst2 = 0.0
    wit1 = wit2 = None
    for _ in range(share):
        k = int(rng.integers(0, params.cap + 1))
        address = _random_address(rng, n, k)
        cube = cube_of(address, n, params.sched)
        x, y = (cube.center + rng.uniform(-cube.side / 2, cube.side / 2, size=n) for _ in range(2))
        fx, fy = eval_f(x, params), eval_f(y, params)
        diam = tree.node(address).diameter
        q1 = _ratio(abs(fx.value - fy.value) - fx.error_bound - fy.error_bound, diam)
        chain = params.M ** params.tau * sigma(P, k, params) * params.sched.pi(k + 1) ** P
        q2 = _ratio(diam, chain)
        if q1 > worst1:
            worst1, wit1 = q1, np.concatenate([x, y])
        if q2 > worst2:
            worst2, wit2 = q2, np.concatenate([x, y])
    entries.append(_entry("continuity_value_vs_diameter", 1.0, worst1, wit1, slack=1e-12))
    entries.append(_entry("continuity_diameter_vs_sigma", 1.0, worst2, wit2, slack=1e-12))

    # finite differences of D^{p-1} f against the analytic D^p f
    worst, wit = 0.0, None
    for _ in range(share):
        k = int(rng.integers(0, d + 1))
        x, address = _transition_point(rng, params, k)
        h = 1e-6 * params.sched.L(k)
        diam = tree.node(address).diameter
        for p in range(1, P + 1):
            an = _derivative(x, params, p).tensor
            fd = np.empty_like(an)
            for j in range(n):
                e = np.zeros(n)
                e[j] = h
                hi = _derivative(x + e, params, p - 1).tensor if p > 1 else eval_f(x + e, params).value
                lo = _derivative(x - e, params, p - 1).tensor if p > 1 else eval_f(x - e, params).value
                fd[..., j] = (np.asarray(hi) - np.asarray(lo)) / (2 * h)
            scale = params.plateau.M[p] * params.sched.pi(k + 1) ** -p * diam
            err = _ratio(float(np.linalg.norm(fd - an)), scale)
            if err > worst:
                worst, wit = err, x
    entries.append(_entry("finite_difference", FD_TOL, worst, wit))
    return entries


def verify_construction(params: ConstructionParams, sample_budget: int, seed: int = 0) -> VerificationReport:
    """Check every inequality of the smoothness argument; see the README for the entry list.

    ``sample_budget`` is split evenly between the sampled checks; with a
    budget of 0 (or depth 0) only the structural checks run.
    """
    if sample_budget < 0:
        raise ValueError("sample_budget must be >= 0")
    report = VerificationReport(
        params.constants(),
        {"n": params.n, "s": params.s, "depth": params.depth, "sample_budget": sample_budget, "seed": seed},
    )
    report.entries.extend(_structural(params))
    if sample_budget > 0 and params.depth > 0:
        report.entries.extend(_sampled(params, sample_budget, np.random.default_rng(seed)))
    return report


# ---------------------------------------------------------------- tiling


@dataclass(frozen=True, eq=False)
class TiledFunction:
    """``F``: tile ``i`` on the unit cube at ``(2i, 0, ..., 0)``, joined by smooth steps in ``x_1``.

    Between tiles the value depends on ``x_1`` only and moves from one
    tile's outside constant to the next through the smooth step profile.
    """

    n: int
    tiles: tuple[ConstructionParams, ...]

    @property
    def offsets(self) -> np.ndarray:
        out = np.zeros((len(self.tiles), self.n))
        out[:, 0] = 2.0 * np.arange(len(self.tiles))
        return out

    def _base(self, x1: float, order: int) -> np.ndarray:
        # derivatives of the x_1 profile outside the tiles, orders 0..order
        levels = [t.tree.root.r for t in self.tiles]
        out = np.zeros(order + 1)
        i = int(math.floor((x1 + 0.5) / 2.0))
        if i < 0:
            out[0] = levels[0]
        elif i >= len(levels) - 1:
            out[0] = levels[-1]
        else:
            u = x1 - (2.0 * i + 0.5)
            jet = ramp_jet([u], order)[:, 0]
            out[:] = (levels[i + 1] - levels[i]) * jet
            out[0] += levels[i]
        return out

    def _tile(self, x: np.ndarray) -> int | None:
        for i, off in enumerate(self.offsets):
            if np.all(np.abs(x - off) <= 0.5):
                return i
        return None

    def __call__(self, x) -> float:
        x = _as_point(x, self.n)
        if not self.tiles:
            raise ValueError("empty assembly")
        i = self._tile(x)
        if i is None:
            return float(self._base(x[0], 0)[0])
        return eval_f(x - self.offsets[i], self.tiles[i]).value

    def derivative(self, x, p: int) -> np.ndarray:
        """Order-``p`` derivative tensor of ``F``; tiles use their cube-tree formula."""
        x = _as_point(x, self.n)
        if not self.tiles:
            raise ValueError("empty assembly")
        i = self._tile(x)
        if i is not None:
            return _derivative(x - self.offsets[i], self.tiles[i], p).tensor
        out = np.zeros((self.n,) * p)
        out[(0,) * p] = self._base(x[0], p)[p]
        return out


def tile_assembly(targets, n: int, s: float, depth: int) -> TiledFunction:
    """Build one construction per target and place them along the first axis with spacing 2."""
    return TiledFunction(n, tuple(build(B, n, s, depth) for B in targets))


def grid_rows(params: ConstructionParams, per_axis: int, lo: float = -0.5, hi: float = 0.5):
    """Rows ``(x_1, ..., x_n, f, |Df|)`` over a regular grid of ``[lo, hi]**n``."""
    axes = np.linspace(lo, hi, per_axis)
    for point in np.stack(np.meshgrid(*([axes] * params.n), indexing="ij"), -1).reshape(-1, params.n):
        value = eval_f(point, params).value
        grad = _derivative(point, params, 1).norm
        yield [*point.tolist(), value, grad]
