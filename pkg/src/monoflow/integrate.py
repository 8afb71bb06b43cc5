"""Trajectory sampling of the flow generated by a SystemDef.

Two integrators only: classical fixed-step RK4 and the adaptive
Dormand-Prince 5(4) embedded pair.  Backward time negates the field (the
stored times stay positive: sample k of a Backward trajectory is the state
at flow time -times[k]).  Samples are the accepted integration steps; there
is no dense interpolation, so callers needing finer grids request a smaller
(max) step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUp, DimensionMismatch, StepFailure
from .systems import SystemDef, eval_field

# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# b5 - b4: coefficients of the embedded error estimate
_DP_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered flow samples.  times strictly increasing, states finite."""

    times: np.ndarray
    states: np.ndarray
    direction: Direction
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.states) or len(self.times) < 2:
            raise DimensionMismatch("need at least two matching samples")
        if not np.all(np.diff(self.times) > 0):
            raise DimensionMismatch("times must be strictly increasing")
        if not (np.all(np.isfinite(self.states)) and np.all(np.isfinite(self.times))):
            raise DimensionMismatch("non-finite trajectory sample")

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    def to_csv(self) -> str:
        """Delimited export: header t,x1,...,xN; 17 significant digits; LF."""
        cols = ["t"] + [f"x{i + 1}" for i in range(self.dimension)]
        lines = [",".join(cols)]
        for t, x in zip(self.times, self.states):
            lines.append(",".join("%.17g" % v for v in (t, *x)))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class IntegratorOptions:
    method: str = "dp54"          # "rk4" | "dp54"
    step: float = 1e-2            # rk4 step
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float | None = None  # dp54 step ceiling (also first step guess)
    norm_cap: float = 1e9


def _rk4_step(f, t, x, h):
    k1 = f(t, x)
    k2 = f(t + h / 2, x + h / 2 * k1)
    k3 = f(t + h / 2, x + h / 2 * k2)
    k4 = f(t + h, x + h * k3)
    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(sys: SystemDef, x0, t_end: float,
              direction: Direction = Direction.FORWARD,
              opts: IntegratorOptions | None = None,
              rhs=None) -> Trajectory:
    """Sample the flow of ``sys`` from x0 over [0, t_end].

    ``rhs`` overrides the field with a callable f(t, x) of matching
    dimension (used internally for augmented/variational systems).  Raises
    BlowUp(t_reached) as soon as the state norm exceeds opts.norm_cap and
    StepFailure if the adaptive step underflows.
    """
    opts = opts or IntegratorOptions()
    if t_end <= 0:
        raise DimensionMismatch("t_end must be positive")
    x0 = np.asarray(x0, dtype=float)

    if rhs is None:
        if direction is Direction.FORWARD:
            def f(t, x):
                return eval_field(sys, x)
        else:
            def f(t, x):
                return -eval_field(sys, x)
    else:
        base = rhs
        if direction is Direction.FORWARD:
            f = base
        else:
            def f(t, x):
                return -base(t, x)

    if opts.method == "rk4":
        times, states = _run_rk4(f, x0, t_end, opts)
        meta = {"method": "rk4", "step": opts.step, "norm_cap": opts.norm_cap}
    elif opts.method == "dp54":
        times, states = _run_dp54(f, x0, t_end, opts)
        meta = {"method": "dp54", "rel_tol": opts.rel_tol, "abs_tol": opts.abs_tol,
                "max_step": opts.max_step, "norm_cap": opts.norm_cap}
    else:
        raise DimensionMismatch(f"unknown method {opts.method!r}")
    return Trajectory(np.array(times), np.array(states), direction, meta)


def _run_rk4(f, x0, t_end, opts):
    h = opts.step
    n_steps = max(1, int(np.ceil(t_end / h - 1e-12)))
    grid = np.minimum(np.arange(n_steps + 1) * h, t_end)
    grid[-1] = t_end
    times = [0.0]
    states = [x0]
    x = x0
    for k in range(n_steps):
        hk = grid[k + 1] - grid[k]
        x = _rk4_step(f, grid[k], x, hk)
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > opts.norm_cap:
            raise BlowUp(float(grid[k + 1]))
        times.append(float(grid[k + 1]))
        states.append(x)
    return times, states


def _run_dp54(f, x0, t_end, opts):
    rtol, atol = opts.rel_tol, opts.abs_tol
    h = opts.max_step if opts.max_step else t_end / 100
    h = min(h, t_end)
    t, x = 0.0, x0
    times = [0.0]
    states = [x0]
    k = [None] * 7
    while t < t_end:
        h = min(h, t_end - t)
        k[0] = f(t, x)
        for s in range(1, 7):
            xs = x + h * sum(a * k[j] for j, a in enumerate(_DP_A[s]))
            k[s] = f(t + _DP_C[s] * h, xs)
        x5 = x + h * sum(b * k[j] for j, b in enumerate(_DP_B5) if b)
        err_vec = h * sum(e * k[j] for j, e in enumerate(_DP_E) if e)
        scale = atol + rtol * np.maximum(np.abs(x), np.abs(x5))
        err = np.sqrt(np.mean((err_vec / scale) ** 2))
        if err <= 1.0:
            t = t + h
            x = x5
            if not np.all(np.isfinite(x)) or np.linalg.norm(x) > opts.norm_cap:
                raise BlowUp(t)
            times.append(t)
            states.append(x)
        elif h <= 1e-13 * max(1.0, abs(t)):
            raise StepFailure(f"step size underflow at t = {t:.6g}")
        factor = 0.9 * (1.0 / err) ** 0.2 if err > 0 else 5.0
        h = h * min(5.0, max(0.2, factor))
        if opts.max_step:
            h = min(h, opts.max_step)
    return times, states
