"""Random profiles, Monte Carlo peak-level distributions and their exact CDFs.

Sampling draws 53-bit dyadic rationals so solver arithmetic stays exact in
64-bit integers; floats enter only when empirical CDFs are compared.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .dynamics import is_line_graph, line_order
from .graphs import Graph, WaterProfile
from .rationals import parse_rational

DYADIC_BITS = 53
DYADIC_DEN = 1 << DYADIC_BITS


# -- exact CDF oracles ---------------------------------------------------------


@dataclass(frozen=True)
class CdfOracle:
    """Piecewise-polynomial distribution function with exact coefficients."""

    name: str
    pieces: tuple[tuple[Fraction, Fraction, tuple[Fraction, ...]], ...]  # (lo, hi, coeffs low->high)

    def __post_init__(self):
        if self.eval_exact(Fraction(0)) != 0:
            raise ValueError(f"{self.name}: F(0) != 0")
        if self.eval_exact(Fraction(1)) != 1:
            raise ValueError(f"{self.name}: F(1) != 1")
        for (lo_a, hi_a, coeffs_a), (lo_b, hi_b, coeffs_b) in zip(self.pieces, self.pieces[1:]):
            if hi_a != lo_b:
                raise ValueError(f"{self.name}: pieces not contiguous")
            left = _horner(coeffs_a, hi_a)
            right = _horner(coeffs_b, lo_b)
            if left != right:
                raise ValueError(f"{self.name}: discontinuity at {hi_a}")

    def eval_exact(self, x: Fraction) -> Fraction:
        if x <= self.pieces[0][0]:
            return Fraction(0) if x <= 0 else _horner(self.pieces[0][2], x)
        for lo, hi, coeffs in self.pieces:
            if lo <= x <= hi:
                return _horner(coeffs, x)
        return Fraction(1)

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        out = np.empty_like(xs)
        out[xs <= 0] = 0.0
        out[xs >= 1] = 1.0
        for lo, hi, coeffs in self.pieces:
            mask = (xs >= float(lo)) & (xs <= float(hi))
            if not np.any(mask):
                continue
            acc = np.zeros(int(mask.sum()))
            for c in reversed(coeffs):
                acc = acc * xs[mask] + float(c)
            out[mask] = acc
        return out


def _horner(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _fr(s: str) -> Fraction:
    return Fraction(s)


_ORACLES = {
    "k2_v1": (
        (_fr("0"), _fr("1/2"), (_fr("0"), _fr("0"), _fr("3/2"))),
        (_fr("1/2"), _fr("1"), (_fr("-1/2"), _fr("2"), _fr("-1/2"))),
    ),
    "line3_v1": (
        (_fr("0"), _fr("1/3"), (_fr("0"), _fr("0"), _fr("0"), _fr("8/3"))),
        (_fr("1/3"), _fr("1/2"), (_fr("1/6"), _fr("-3/2"), _fr("9/2"), _fr("-11/6"))),
        (_fr("1/2"), _fr("2/3"), (_fr("1/6"), _fr("-2"), _fr("13/2"), _fr("-23/6"))),
        (_fr("2/3"), _fr("1"), (_fr("-7/6"), _fr("4"), _fr("-5/2"), _fr("2/3"))),
    ),
    # Exact CDF of the middle-vertex peak level. Derived by exact polytope
    # volume integration of all six optimal-value constraints and verified by
    # 1e6-sample Monte Carlo; see line3_v2_uncorrected for the variant that
    # drops the (2a+b+c)/4 constraint.
    "line3_v2": (
        (_fr("0"), _fr("1/2"), (_fr("0"), _fr("0"), _fr("0"), _fr("17/9"))),
        (_fr("1/2"), _fr("3/4"), (_fr("1"), _fr("-6"), _fr("12"), _fr("-55/9"))),
        (_fr("3/4"), _fr("1"), (_fr("-2"), _fr("6"), _fr("-4"), _fr("1"))),
    ),
    # Known-bad variant kept to document a transcription error that the
    # Monte Carlo gate catches: it is the exact volume of the constraint
    # system with (a+2b+c)/4 in place of (2a+b+c)/4, i.e. with the binding
    # half-step candidate dropped. Never used as an oracle.
    "line3_v2_uncorrected": (
        (_fr("0"), _fr("1/2"), (_fr("0"), _fr("0"), _fr("0"), _fr("2"))),
        (_fr("1/2"), _fr("3/4"), (_fr("7/12"), _fr("-4"), _fr("9"), _fr("-14/3"))),
        (_fr("3/4"), _fr("1"), (_fr("-5/3"), _fr("5"), _fr("-3"), _fr("2/3"))),
    ),
}


def cdf_oracle(name: str) -> CdfOracle:
    """Exact distribution of the peak level under uniform initial profiles.

    k2_v1: either end of a single edge. line3_v1 / line3_v2: end / middle of
    the three-vertex path.
    """
    if name not in _ORACLES:
        raise KeyError(f"unknown CDF case {name!r}; choose from {sorted(_ORACLES)}")
    return CdfOracle(name, _ORACLES[name])


def case_instance(name: str) -> tuple[Graph, int]:
    """Graph and target vertex for a named CDF case."""
    if name == "k2_v1":
        return Graph(2, [(0, 1)]), 0
    if name == "line3_v1":
        return Graph(3, [(0, 1), (1, 2)]), 0
    if name == "line3_v2":
        return Graph(3, [(0, 1), (1, 2)]), 1
    raise KeyError(f"unknown CDF case {name!r}")


# -- sampling ------------------------------------------------------------------


def draw_level_matrix(seed: int, n_samples: int, n_vertices: int) -> np.ndarray:
    """Dyadic uniform draws: int64 numerators over 2**53, one row per sample."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, DYADIC_DEN, size=(n_samples, n_vertices), dtype=np.int64)


@dataclass
class KappaSample:
    """Sorted empirical sample of peak levels with its provenance."""

    values: np.ndarray  # sorted float64
    n: int
    seed: int
    case: str | None = None
    exact_values: tuple[Fraction, ...] | None = None  # draw order, not sorted

    def ecdf(self, xs) -> np.ndarray:
        if self.n == 0:
            raise ValueError("empty sample has no CDF")
        xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
        return np.searchsorted(self.values, xs, side="right") / self.n

    def ks_distance(self, oracle: CdfOracle) -> float:
        """sup_x |F_n(x) - F(x)| against an exact continuous CDF."""
        if self.n == 0:
            raise ValueError("empty sample has no CDF")
        fx = oracle.eval_array(self.values)
        i = np.arange(1, self.n + 1)
        upper = np.max(i / self.n - fx)
        lower = np.max(fx - (i - 1) / self.n)
        return float(max(upper, lower))


def sample_kappa(
    graph: Graph,
    v: int,
    solver: Callable[[WaterProfile, int], Fraction],
    n_samples: int,
    seed: int,
    capacity: Fraction = Fraction(1),
    keep_exact: bool = False,
) -> KappaSample:
    """Monte Carlo peak-level sample with exact per-draw solver arithmetic.

    Draws i.i.d. uniform dyadic profiles from the seeded generator and runs
    the supplied solver on each; deterministic per seed. n_samples = 0 yields
    an empty sample whose evaluator raises.
    """
    matrix = draw_level_matrix(seed, n_samples, graph.n)
    values = np.empty(n_samples, dtype=np.float64)
    exact: list[Fraction] = []
    for i in range(n_samples):
        levels = [Fraction(int(x), DYADIC_DEN) for x in matrix[i]]
        profile = WaterProfile(graph, levels, capacity)
        kv = solver(profile, v)
        if keep_exact:
            exact.append(kv)
        values[i] = float(kv)
    values.sort()
    return KappaSample(
        values=values, n=n_samples, seed=seed, exact_values=tuple(exact) if keep_exact else None
    )


def sample_case_fast(name: str, n_samples: int, seed: int, keep_exact: bool = False) -> KappaSample:
    """Vectorized exact sampler for the named cases.

    Identical draws and exactly the same per-draw values as sample_kappa with
    the closed-form solver: the peak level times a small common denominator
    fits in int64 (12 * 2**53 < 2**57), so everything before the final float
    conversion is integer-exact.
    """
    graph, _ = case_instance(name)
    matrix = draw_level_matrix(seed, n_samples, graph.n)
    if name == "k2_v1":
        a, b = matrix[:, 0], matrix[:, 1]
        scaled = np.where(a >= b, 2 * a, a + b)
        den = 2 * DYADIC_DEN
    elif name == "line3_v1":
        a, b, c = matrix[:, 0], matrix[:, 1], matrix[:, 2]
        scaled = np.maximum(6 * a, np.maximum(3 * (a + b), 2 * (a + b + c)))
        den = 6 * DYADIC_DEN
    elif name == "line3_v2":
        a, b, c = matrix[:, 0], matrix[:, 1], matrix[:, 2]
        scaled = np.maximum.reduce(
            [12 * b, 6 * (a + b), 6 * (b + c), 4 * (a + b + c), 3 * (2 * a + b + c), 3 * (a + b + 2 * c)]
        )
        den = 12 * DYADIC_DEN
    else:
        raise KeyError(f"unknown CDF case {name!r}")
    exact = (
        tuple(Fraction(int(s), den) for s in scaled) if keep_exact else None
    )
    values = scaled.astype(np.float64) / float(den)
    values.sort()
    return KappaSample(values=values, n=n_samples, seed=seed, case=name, exact_values=exact)


def case_solver(name: str) -> Callable[[WaterProfile, int], Fraction]:
    """Exact closed-form solver used by the generic sampler for a named case."""
    from .exact import kappa_closed_form

    def solve(profile: WaterProfile, v: int) -> Fraction:
        return kappa_closed_form(profile, v).value

    return solve


# -- stochastic dominance ------------------------------------------------------


@dataclass(frozen=True)
class DominanceReport:
    max_violation: float
    grid_points: int
    dominated: bool  # F_b <= F_a + tolerance everywhere on the grid
    tolerance: float


def dominance_check(
    sample_a: KappaSample,
    sample_b: KappaSample,
    grid_points: int = 2001,
    tolerance: float = 0.0,
) -> DominanceReport:
    """Pointwise check that b stochastically dominates a: F_b <= F_a on a grid."""
    if sample_a.n != sample_b.n:
        raise ValueError("samples must have the same size")
    grid = np.linspace(0.0, 1.0, grid_points)
    fa = sample_a.ecdf(grid)
    fb = sample_b.ecdf(grid)
    viol = float(np.max(fb - fa))
    return DominanceReport(
        max_violation=max(viol, 0.0),
        grid_points=grid_points,
        dominated=viol <= tolerance,
        tolerance=tolerance,
    )


# -- divergence demo -----------------------------------------------------------


def bernoulli_divergence_demo(
    f: Callable[[int], int] | Sequence[int],
    epsilon: Fraction,
    horizon: int,
    seed: int,
    exact: bool = False,
) -> dict:
    """Trajectory of sum Y_k / f(k) for i.i.d. Bernoulli(epsilon) draws.

    Returns the partial-sum trajectory, the deterministic comparison curve
    epsilon * sum 1/f(k) and the centered residual, whose variance stays
    bounded by epsilon * pi^2 / 6 when f(k) >= k.
    """
    epsilon = parse_rational(epsilon) if not isinstance(epsilon, Fraction) else epsilon
    if not (0 <= epsilon <= 1):
        raise ValueError("epsilon must lie in [0,1]")
    fvals = [int(f[k - 1]) if not callable(f) else int(f(k)) for k in range(1, horizon + 1)]
    if any(b <= a for a, b in zip(fvals, fvals[1:])):
        raise ValueError("f must be strictly increasing")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, DYADIC_DEN, size=horizon, dtype=np.int64)
    # exact comparison: draw/2^53 < epsilon  <=>  draw * den < num * 2^53
    ys = (draws * epsilon.denominator < epsilon.numerator * DYADIC_DEN).astype(np.int64)
    inv = 1.0 / np.asarray(fvals, dtype=np.float64)
    traj = np.cumsum(ys * inv)
    comparison = float(epsilon) * np.cumsum(inv)
    residual = traj - comparison
    out = {
        "horizon": horizon,
        "epsilon": str(epsilon),
        "ys": ys,
        "trajectory": traj,
        "comparison": comparison,
        "residual": residual,
        "final": float(traj[-1]) if horizon else 0.0,
    }
    if exact:
        acc = Fraction(0)
        exact_traj = []
        for yk, fk in zip(ys.tolist(), fvals):
            if yk:
                acc += Fraction(1, fk)
            exact_traj.append(acc)
        out["trajectory_exact"] = exact_traj
        out["comparison_exact_final"] = epsilon * sum((Fraction(1, fk) for fk in fvals), Fraction(0))
    return out


# -- flatness ------------------------------------------------------------------


@dataclass(frozen=True)
class FlatnessReport:
    flat: bool
    epsilon: Fraction
    worst_window: tuple[int, int] | None  # (m, n) extents around the target
    worst_mean: Fraction | None
    worst_deviation: Fraction


def flatness_check(profile: WaterProfile, v: int, epsilon) -> FlatnessReport:
    """Two-sided flatness: every window around v averages within epsilon of 1/2.

    Windows are [v-m, v+n] in path positions for all m, n >= 0 that stay on
    the finite line; the report carries the worst window when one violates.
    """
    epsilon = parse_rational(epsilon)
    g = profile.graph
    if not is_line_graph(g):
        raise ValueError("flatness is defined on path graphs")
    order = line_order(g)
    pos = order.index(v)
    levels = [profile.levels[u] for u in order]
    prefix = [Fraction(0)]
    for x in levels:
        prefix.append(prefix[-1] + x)
    half = Fraction(1, 2)
    worst_dev = Fraction(-1)
    worst = None
    worst_mean = None
    for m in range(pos + 1):
        for nn in range(len(levels) - pos):
            lo, hi = pos - m, pos + nn
            width = hi - lo + 1
            mean = (prefix[hi + 1] - prefix[lo]) / width
            dev = abs(mean - half)
            if dev > worst_dev:
                worst_dev, worst, worst_mean = dev, (m, nn), mean
    return FlatnessReport(
        flat=worst_dev <= epsilon,
        epsilon=epsilon,
        worst_window=worst,
        worst_mean=worst_mean,
        worst_deviation=worst_dev,
    )


def rejection_sample_flat_profiles(
    n: int,
    epsilon,
    count: int,
    seed: int,
    base_denominator: int = 2500,
    n_spikes: int = 2,
    spike_min_distance: int = 10,
    max_proposals: int = 500_000,
) -> tuple[Graph, int, list[WaterProfile]]:
    """Rejection-sample exactly epsilon-flat profiles on an n-vertex line.

    Proposals mix a narrow uniform band around 1/2 with a few higher spikes
    far from the center (which flatness can absorb only when the surrounding
    window averages compensate), so accepted profiles are flat but not
    trivially constant. Acceptance is checked with exact integer window sums.
    """
    epsilon = parse_rational(epsilon)
    g = Graph(n, [(i, i + 1) for i in range(n - 1)])
    center = n // 2
    D = base_denominator
    eps_num, eps_den = epsilon.numerator, epsilon.denominator
    band = int(2 * epsilon * D)  # proposal half-width 2*epsilon
    rng = np.random.default_rng(seed)
    out: list[WaterProfile] = []
    proposals = 0
    while len(out) < count:
        proposals += 1
        if proposals > max_proposals:
            raise RuntimeError("rejection sampling budget exhausted; widen epsilon")
        nums = rng.integers(D // 2 - band, D // 2 + band + 1, size=n).astype(object)
        for _ in range(n_spikes):
            p = int(rng.integers(0, n))
            dist = abs(p - center)
            if dist < spike_min_distance:
                continue
            cap = D // 2 + int((dist + 1) * eps_num * D // eps_den)
            nums[p] = int(rng.integers(D // 2, min(cap, D) + 1))
        prefix = [0]
        for x in nums.tolist():
            prefix.append(prefix[-1] + int(x))
        ok = True
        for m in range(center + 1):
            if not ok:
                break
            for nn in range(n - center):
                lo, hi = center - m, center + nn
                width = hi - lo + 1
                s = prefix[hi + 1] - prefix[lo]
                # |s/(width*D) - 1/2| <= eps  <=>  |2s - width*D| * eps_den <= 2*width*D*eps_num
                if abs(2 * s - width * D) * eps_den > 2 * width * D * eps_num:
                    ok = False
                    break
        if ok:
            levels = [Fraction(int(x), D) for x in nums.tolist()]
            out.append(WaterProfile(g, levels, Fraction(1)))
    return g, center, out
