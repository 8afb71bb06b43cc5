"""Interval-translation witness construction.

Setting: on one time axis, place equally spaced target windows
I_n = [nA, nA + E] (n = 0, 1, 2, ...) with spacing A and width E <= A, and
comparison points c_l = l*B (l = 1, 2, ...) with spacing B.  The task is to
produce indices (l*, n*) with c_{l*} inside I_{n*}, i.e.

    l* B - n* A  in  [0, E],

together with the full recursion trace that certifies the choice.  The
construction is exact: write B = k0 A + R0 with 0 <= R0 < A.  If R0 <= E
the first point already lands (l* = 1, n* = k0).  Otherwise track the
deficit D_0 = A - R0 in (0, A - E): each point c_l sits D-short of a window
start, and taking n_i copies of the current stride (n_i minimal with
(n_i - 1) D_i < A - E <= n_i D_i) either lands inside a window
(n_i D_i <= A, terminal) or overshoots into a strictly smaller deficit
D_{i+1} = n_i D_i - A < D_i - E.  Since each round shrinks the deficit by
more than E, the recursion ends within p + 1 rounds where D_0 = pE + F,
F in (0, E].

Arithmetic is exact rational (`fractions.Fraction`) by default.  Float mode
exists for irrational inputs only: it requires an explicit epsilon and
raises ToleranceAmbiguity whenever a branch comparison lands within epsilon
of its boundary.

A brute-force scan (`brute_force_witness`) provides the independent oracle:
the smallest l with l*B mod A in [0, E].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidProblem, IterationCap, ToleranceAmbiguity

ITERATION_CAP = 10**6

Scalar = Fraction | float


class WitnessCase(enum.Enum):
    MULTIPLE_OR_SMALL_REMAINDER = "multiple_or_small_remainder"
    CASE_I = "case_i"     # first stride choice already lands
    CASE_II = "case_ii"   # at least one deficit restart was needed


@dataclass(frozen=True)
class WitnessProblem:
    """Window spacing A, point spacing B, window width E; 0 < E <= A.

    ``epsilon`` switches on float mode; leave it None for exact rationals.
    """

    A: Scalar
    B: Scalar
    E: Scalar
    epsilon: float | None = None

    def __post_init__(self):
        if self.epsilon is None:
            for name in ("A", "B", "E"):
                if not isinstance(getattr(self, name), Fraction):
                    object.__setattr__(self, name, as_fraction(getattr(self, name)))
        else:
            if self.epsilon <= 0:
                raise InvalidProblem("float mode requires epsilon > 0")
            for name in ("A", "B", "E"):
                object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.A > 0 and self.B > 0):
            raise InvalidProblem("need A > 0 and B > 0")
        if not (0 < self.E <= self.A):
            raise InvalidProblem("need 0 < E <= A")

    @property
    def exact(self) -> bool:
        return self.epsilon is None


@dataclass(frozen=True)
class TraceStep:
    """One recursion round: deficit D, stride count n, and the cumulative
    point index l = prod n_j and window index h after this round."""

    level: int
    D: Scalar
    n: int
    l: int
    h: int


@dataclass(frozen=True)
class WitnessResult:
    l_star: int
    n_star: int
    landing_offset: Scalar       # l* B - n* A, guaranteed in [0, E]
    trace: tuple[TraceStep, ...]
    k0: int
    R0: Scalar
    p: int | None                # deficit budget: D0 = pE + F (None if no D0)
    F: Scalar | None
    case: WitnessCase

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            return v

        return {
            "l_star": self.l_star,
            "n_star": self.n_star,
            "landing_offset": enc(self.landing_offset),
            "landing_offset_float": float(self.landing_offset),
            "k0": self.k0,
            "R0": enc(self.R0),
            "p": self.p,
            "F": enc(self.F) if self.F is not None else None,
            "case": self.case.value,
            "trace": [
                {"level": s.level, "D": enc(s.D), "n": s.n, "l": s.l, "h": s.h}
                for s in self.trace
            ],
        }


def as_fraction(value) -> Fraction:
    """Exact conversion accepting Fraction, int, 'p/q' and decimal strings.

    Floats are rejected in exact mode: their binary expansion is almost
    never the rational the caller meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise InvalidProblem(
        f"cannot use {type(value).__name__} exactly; pass a string or Fraction, "
        "or set epsilon for float mode")


class _Cmp:
    """Comparisons that refuse to decide within epsilon of the boundary."""

    def __init__(self, epsilon: float | None):
        self.eps = epsilon

    def le(self, a, b, what: str) -> bool:
        if self.eps is not None and abs(a - b) <= self.eps:
            raise ToleranceAmbiguity(
                f"{what}: |{a!r} - {b!r}| <= epsilon; use rational arithmetic")
        return a <= b

    def floor_ratio(self, a, b, what: str) -> int:
        q = a / b
        f = math.floor(q)
        if self.eps is not None and min(q - f, f + 1 - q) * abs(b) <= self.eps:
            raise ToleranceAmbiguity(
                f"{what}: ratio {q!r} within epsilon of an integer")
        return int(f)

    def ceil_ratio(self, a, b, what: str) -> int:
        q = a / b
        c = math.ceil(q)
        if self.eps is not None and min(q - (c - 1), c - q) * abs(b) <= self.eps:
            raise ToleranceAmbiguity(
                f"{what}: ratio {q!r} within epsilon of an integer")
        return int(c)


def construct_witness(prob: WitnessProblem) -> WitnessResult:
    """Run the landing construction; exact in rational mode.

    Raises ToleranceAmbiguity in float mode when a branch is undecidable
    and IterationCap if the recursion exceeds 10^6 rounds (only reachable
    in float mode with pathological ratios).
    """
    A, B, E = prob.A, prob.B, prob.E
    cmp = _Cmp(prob.epsilon)

    k0 = cmp.floor_ratio(B, A, "k0 = floor(B/A)")
    R0 = B - k0 * A
    if cmp.le(R0, E, "R0 vs E"):
        result = WitnessResult(
            l_star=1, n_star=k0, landing_offset=R0, trace=(),
            k0=k0, R0=R0, p=None, F=None,
            case=WitnessCase.MULTIPLE_OR_SMALL_REMAINDER)
        _check_result(prob, result)
        return result

    D0 = A - R0  # in (0, A - E)
    # p and F are diagnostics (the round budget), not a branch: no ambiguity
    # check is needed for them in float mode.
    p = math.ceil(D0 / E) - 1
    F = D0 - p * E
    trace: list[TraceStep] = []
    D = D0
    l = 1
    h = 0
    level = 0
    while True:
        if level >= ITERATION_CAP:
            raise IterationCap(f"no landing within {ITERATION_CAP} rounds")
        n = cmp.ceil_ratio(A - E, D, f"stride count at level {level}")
        h = n * (k0 + 1) - 1 if level == 0 else n * h - 1
        l *= n
        trace.append(TraceStep(level, D, n, l, h))
        if cmp.le(n * D, A, f"landing test at level {level}"):
            case = WitnessCase.CASE_I if level == 0 else WitnessCase.CASE_II
            result = WitnessResult(
                l_star=l, n_star=h, landing_offset=l * B - h * A,
                trace=tuple(trace), k0=k0, R0=R0, p=p, F=F, case=case)
            _check_result(prob, result)
            return result
        D = n * D - A
        level += 1


def _check_result(prob: WitnessProblem, res: WitnessResult) -> None:
    """Self-verification: landing membership, trace recursion identities,
    stride minimality, deficit decrements, and the round budget."""
    A, B, E = prob.A, prob.B, prob.E
    slack = 0 if prob.exact else 8 * prob.epsilon
    off = res.l_star * B - res.n_star * A
    assert -slack <= off <= E + slack, f"landing offset {off} outside [0, {E}]"
    if not res.trace:
        return
    assert res.p is not None and res.F is not None
    if prob.exact:
        assert res.p >= 0 and 0 < res.F <= E
        assert len(res.trace) <= res.p + 1, "round budget exceeded"
    prev = None
    l_running = 1
    for step in res.trace:
        assert step.n >= 1
        if prob.exact:
            assert (step.n - 1) * step.D < A - E <= step.n * step.D, \
                "stride count not the minimal admissible one"
        l_running *= step.n
        assert step.l == l_running
        if prev is not None:
            assert abs(step.D - (prev.n * prev.D - A)) <= slack
            if prob.exact:
                assert 0 < step.D < prev.D - E, "deficit did not shrink by > E"
            assert step.h == step.n * prev.h - 1
        else:
            assert step.h == step.n * (res.k0 + 1) - 1
        prev = step


def brute_force_witness(prob: WitnessProblem, l_max: int) -> tuple[int, int] | None:
    """Independent oracle: smallest l in [1, l_max] with l*B mod A in [0, E].

    Returns (l, n) with n = floor(l*B / A), or None if nothing lands within
    the bound.  Exact in rational mode (integer arithmetic after clearing
    denominators).
    """
    if l_max < 1:
        raise InvalidProblem("l_max must be at least 1")
    if prob.exact:
        A, B, E = prob.A, prob.B, prob.E
        scale = math.lcm(A.denominator, B.denominator, E.denominator)
        ai = A.numerator * (scale // A.denominator)
        bi = B.numerator * (scale // B.denominator)
        ei = E.numerator * (scale // E.denominator)
        acc = 0
        for l in range(1, l_max + 1):
            acc += bi
            r = acc % ai
            if r <= ei:
                return l, (l * bi - r) // ai
        return None
    for l in range(1, l_max + 1):
        r = math.fmod(l * prob.B, prob.A)
        if 0 <= r <= prob.E:
            return l, int(math.floor((l * prob.B) / prob.A))
    return None
