"""Finite truncations of a pendant-rich half-line and the sweep schedule
that concentrates weight on high pendants.

The schedule works on the dual side: starting from a unit mass at the line's
first vertex, it sweeps each prefix segment (plus one pendant) until the
pendant holds at least remaining/(f(k)+2) of the mass, freezes the pendant,
and moves on. Values are raw dyadic integers (numerator, exponent) so the
arithmetic stays exact without per-operation gcd cost.
"""
from __future__ import annotations

from array import array
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .dynamics import Move
from .graphs import Graph, WaterProfile
from .rationals import parse_rational


class SweepCapExceeded(RuntimeError):
    """Segment sweeps hit the hard cap before reaching the weight threshold."""


@dataclass(frozen=True)
class HalfLineSpec:
    """Pendant positions f(k) for k = 1..m plus the qualification threshold.

    f comes either from an explicit table or a named family; divergence of
    sum 1/f(k) is a declared property of families (affine with positive step)
    and cannot be decided from a finite table.
    """

    m: int
    epsilon: Fraction
    table: tuple[int, ...] | None = None
    family: tuple[str, tuple[Fraction, ...]] | None = None  # ("affine", (a, b))

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be >= 0")
        if not (0 < self.epsilon < 1):
            raise ValueError("epsilon must lie in (0,1)")
        if (self.table is None) == (self.family is None):
            raise ValueError("exactly one of table/family is required")
        vals = self.positions()
        if any(v < 1 for v in vals):
            raise ValueError("f(k) must be >= 1")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("f must be strictly increasing")

    @staticmethod
    def affine(a: int, b: int, m: int, epsilon) -> "HalfLineSpec":
        return HalfLineSpec(
            m=m, epsilon=parse_rational(epsilon), family=("affine", (Fraction(a), Fraction(b)))
        )

    @staticmethod
    def from_table(table: Sequence[int], epsilon) -> "HalfLineSpec":
        return HalfLineSpec(
            m=len(table), epsilon=parse_rational(epsilon), table=tuple(int(x) for x in table)
        )

    def positions(self) -> tuple[int, ...]:
        if self.table is not None:
            return self.table
        kind, params = self.family
        if kind != "affine":
            raise ValueError(f"unknown family {kind!r}")
        a, b = params
        vals = []
        for k in range(1, self.m + 1):
            v = a * k + b
            if v.denominator != 1:
                raise ValueError("affine family must produce integers")
            vals.append(int(v))
        return tuple(vals)

    def divergence_declared(self) -> bool | None:
        """True for families with divergent sum 1/f(k); None (unknown) for tables."""
        if self.family is not None and self.family[0] == "affine" and self.family[1][0] > 0:
            return True
        return None


def build_half_line(
    spec: HalfLineSpec,
    line_level=Fraction(0),
    pendant_level=Fraction(1),
    capacity=Fraction(1),
) -> tuple[Graph, WaterProfile, dict]:
    """Truncated instance: line v1..vK (K = f(m)) plus pendants u1..um.

    Pendant k attaches to line position f(k); vertex 0 is the target v1.
    """
    positions = spec.positions()
    if spec.m == 0:
        g = Graph(1, [], names=["v1"])
        return g, WaterProfile(g, [parse_rational(line_level)], parse_rational(capacity)), {
            "line": [0],
            "pendants": [],
            "positions": (),
        }
    K = positions[-1]
    names = [f"v{i + 1}" for i in range(K)] + [f"u{k + 1}" for k in range(spec.m)]
    edges = [(i, i + 1) for i in range(K - 1)]
    for k, fk in enumerate(positions):
        edges.append((fk - 1, K + k))
    g = Graph(K + spec.m, edges, names=names)
    line_level = parse_rational(line_level)
    pendant_level = parse_rational(pendant_level)
    levels = [line_level] * K + [pendant_level] * spec.m
    profile = WaterProfile(g, levels, parse_rational(capacity))
    roles = {"line": list(range(K)), "pendants": list(range(K, K + spec.m)), "positions": positions}
    return g, profile, roles


@dataclass(frozen=True)
class StepAudit:
    index: int  # pendant ordinal among selected ones (1-based)
    pendant: int  # vertex id
    f_value: int
    sweeps: int
    weight: Fraction  # frozen dual weight of this pendant
    threshold: Fraction  # remaining/(f+2) it had to reach
    achieved: Fraction  # level at v if stopping after this step
    residual: Fraction  # 1 - sum of frozen weights
    residual_bound: Fraction  # prod (1 - 1/(f_j+2)) over steps so far


@dataclass
class HalfLineScheduleResult:
    """Outcome of the pendant-freezing sweep schedule.

    move_pairs holds the water-side sequence compactly (all mu = 1/2,
    chronological order); moves() materializes Move objects on demand.
    """

    move_pairs: array  # flattened (x, y) int pairs
    achieved: Fraction
    residual: Fraction
    residual_bound: Fraction
    steps: tuple[StepAudit, ...]
    weights: tuple[Fraction, ...]  # final dual weight profile
    warning: str | None = None

    @property
    def move_count(self) -> int:
        return len(self.move_pairs) // 2

    def moves(self) -> Iterator[Move]:
        pairs = self.move_pairs
        for i in range(0, len(pairs), 2):
            yield Move.single(pairs[i], pairs[i + 1])

    def replay_level(self, profile: WaterProfile, v: int = 0) -> Fraction:
        """Re-run the water-side sequence; must reproduce `achieved` exactly.

        Fraction arithmetic: intended for small schedules (tests); the
        scheduler itself uses raw dyadics."""
        fl = list(profile.levels)
        pairs = self.move_pairs
        for i in range(0, len(pairs), 2):
            x, y = pairs[i], pairs[i + 1]
            avg = (fl[x] + fl[y]) / 2
            fl[x] = avg
            fl[y] = avg
        return fl[v]


def half_line_schedule(
    spec: HalfLineSpec,
    profile: WaterProfile,
    v: int = 0,
    sweep_cap: int = 10_000,
) -> HalfLineScheduleResult:
    """Freeze qualifying pendants one by one via prefix sweeps.

    Qualifying pendants hold at least 1 - epsilon initially. For the k-th of
    them the segment v1..v_f(k) plus the pendant is swept (complete averages,
    left to right) until the pendant's dual weight reaches
    remaining/(f(k)+2); it is then never touched again, which caps the
    residual mass on the line by the product bound prod(1 - 1/(f(k)+2)).
    """
    positions = spec.positions()
    g = profile.graph
    K = positions[-1] if positions else 1
    one = Fraction(1)
    qual_level = 1 - spec.epsilon
    selected = [
        (k + 1, positions[k], K + k)
        for k in range(spec.m)
        if profile.levels[K + k] >= qual_level
    ]
    warning = None
    if not selected:
        warning = "no qualifying pendants; schedule is empty"
    # dyadic state: value[i] = num[i] / 2**exp[i]
    num = [0] * g.n
    exp = [0] * g.n
    num[v] = 1
    rem_num, rem_exp = 1, 0
    pairs = array("l")
    steps: list[StepAudit] = []
    frozen_sum = Fraction(0)
    bound = Fraction(1)
    for ordinal, (k_index, fk, u) in enumerate(selected, start=1):
        path = list(range(fk)) + [u]
        edges = [(path[i], path[i + 1]) for i in range(len(path) - 1)]
        thr_mult = fk + 2
        sweeps = 0
        while True:
            # num[u]/2^exp[u] >= rem/(fk+2) ?
            lhs = num[u] * thr_mult
            if exp[u] >= rem_exp:
                reached = lhs >= rem_num << (exp[u] - rem_exp)
            else:
                reached = lhs << (rem_exp - exp[u]) >= rem_num
            if reached:
                break
            sweeps += 1
            if sweeps > sweep_cap:
                raise SweepCapExceeded(
                    f"pendant u{k_index} (f={fk}) not at threshold after {sweep_cap} sweeps"
                )
            for x, y in edges:
                ex, ey = exp[x], exp[y]
                if ex >= ey:
                    s = ex
                    total = num[x] + (num[y] << (ex - ey))
                else:
                    s = ey
                    total = (num[x] << (ey - ex)) + num[y]
                s += 1
                num[x] = total
                num[y] = total
                exp[x] = s
                exp[y] = s
                pairs.append(x)
                pairs.append(y)
        weight = Fraction(num[u], 1 << exp[u])
        threshold = Fraction(rem_num, (1 << rem_exp) * thr_mult)
        # rem -= weight
        if rem_exp >= exp[u]:
            rem_num -= num[u] << (rem_exp - exp[u])
        else:
            rem_num = (rem_num << (exp[u] - rem_exp)) - num[u]
            rem_exp = exp[u]
        frozen_sum += weight
        bound *= 1 - Fraction(1, thr_mult)
        achieved_now = _dot_dyadic(num, exp, profile)
        steps.append(
            StepAudit(
                index=ordinal,
                pendant=u,
                f_value=fk,
                sweeps=sweeps,
                weight=weight,
                threshold=threshold,
                achieved=achieved_now,
                residual=one - frozen_sum,
                residual_bound=bound,
            )
        )
    achieved = _dot_dyadic(num, exp, profile) if selected else profile.levels[v]
    weights = tuple(Fraction(num[i], 1 << exp[i]) for i in range(g.n))
    # water-side chronological order is the reverse of the dual construction
    rev = array("l")
    for i in range(len(pairs) - 2, -2, -2):
        rev.append(pairs[i])
        rev.append(pairs[i + 1])
    return HalfLineScheduleResult(
        move_pairs=rev,
        achieved=achieved,
        residual=one - frozen_sum,
        residual_bound=bound,
        steps=tuple(steps),
        weights=weights,
        warning=warning,
    )


def _dot_dyadic(num: list[int], exp: list[int], profile: WaterProfile) -> Fraction:
    total = Fraction(0)
    for i, lv in enumerate(profile.levels):
        if num[i]:
            total += Fraction(num[i], 1 << exp[i]) * lv
    return total
