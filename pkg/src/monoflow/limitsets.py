"""Limit-set estimation, ordering diagnostics, and classification.

``estimate_limit_set`` integrates through a transient and then samples a
number of successive windows, using the Hausdorff distance between
consecutive window clouds as the convergence proxy.  ``non_ordering_check``
tests a point cloud for pairs ordered by the cone (strict-interior pairs
falsify the limit-set property; plain strict pairs falsify the cycle
property).  ``project_and_check`` maps the cloud to the hyperplane
orthogonal to an interior cone direction and certifies sample-level
injectivity.  ``classify_limit_set`` distinguishes equilibria, clouds that
contain an equilibrium, and (in 3-space) periodic orbits located via a
Poincare section with bisected first returns.  Spectral diagnostics report
equilibrium eigenvalues and cycle multipliers for hyperbolicity checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import Cone
from .errors import (AlphaUnbounded, BlowUp, DimensionMismatch, NotEquilibrium,
                     NotPeriodic, VNotInterior)
from .integrate import Direction, IntegratorOptions, integrate
from .systems import SystemDef, eval_field, jacobian

EQUILIBRIUM_RESIDUAL = 1e-9
POINT_CLOUD_EPS = 1e-6
RECURRENCE_FACTOR = 1e-4
TRIVIAL_MULTIPLIER_TOL = 1e-3
HYPERBOLIC_MARGIN = 1e-3
SPECTRUM_MARGIN = 1e-6


@dataclass(frozen=True)
class LimitSetEstimate:
    points: np.ndarray
    direction: Direction           # FORWARD samples the forward-limit set
    seed_state: np.ndarray
    transient_time: float
    sample_window: float
    hausdorff_gap: float
    converged: bool = True

    @property
    def diameter(self) -> float:
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def barycenter(self) -> np.ndarray:
        return self.points.mean(axis=0)


@dataclass(frozen=True)
class LimitSetClass:
    verdict: str                   # equilibrium | periodic_orbit | contains_equilibrium | inconclusive
    point: np.ndarray | None = None
    period: float | None = None
    evidence: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NonOrderingReport:
    ok: bool
    worst_pair: tuple[int, int, str] | None
    worst_min_slack: float
    interior_pairs: int
    strict_pairs: int
    pairs_checked: int

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "worst_pair": list(self.worst_pair) if self.worst_pair else None,
                "worst_min_slack": self.worst_min_slack,
                "interior_pairs": self.interior_pairs,
                "strict_pairs": self.strict_pairs,
                "pairs_checked": self.pairs_checked}


@dataclass(frozen=True)
class ProjectionReport:
    projected: np.ndarray          # (m, N-1) coordinates in a basis of v-perp
    injectivity_margin: float
    direction: np.ndarray

    def to_json(self) -> dict:
        return {"injectivity_margin": self.injectivity_margin,
                "direction": self.direction.tolist()}


@dataclass(frozen=True)
class SpectrumReport:
    at: dict
    values: np.ndarray             # eigenvalues or multipliers
    hyperbolic: bool
    margin: float
    note: str = ""
    liouville_residual: float | None = None

    def to_json(self) -> dict:
        return {"at": self.at,
                "values": [[float(v.real), float(v.imag)] for v in self.values],
                "hyperbolic": self.hyperbolic,
                "margin": self.margin,
                "note": self.note,
                "liouville_residual": self.liouville_residual}


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two point clouds."""
    d2 = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2)
    return float(np.sqrt(max(d2.min(axis=1).max(), d2.min(axis=0).max())))


def estimate_limit_set(sys: SystemDef, x0, direction: Direction = Direction.FORWARD,
                       transient: float = 50.0, window: float = 20.0,
                       refine: int = 3, max_step: float | None = None,
                       opts: IntegratorOptions | None = None,
                       gap_threshold: float = 1e-2,
                       max_points_per_window: int = 2000) -> LimitSetEstimate:
    """Sample the forward (or backward) limit set of x0.

    Integrates through the transient, then over ``refine`` successive
    windows of equal length; the returned points are the last window's
    samples and the gap is the Hausdorff distance between the last two
    window clouds (above ``gap_threshold`` flags non-convergence but still
    returns the points).  Backward estimation reports AlphaUnbounded when
    the orbit escapes the norm cap.
    """
    if transient <= 0 or window <= 0:
        raise DimensionMismatch("transient and window must be positive")
    if refine < 2:
        raise DimensionMismatch("need at least two windows for the gap diagnostic")
    base = opts or IntegratorOptions()
    if max_step is None:
        max_step = window / 400
    run_opts = IntegratorOptions(method="dp54", rel_tol=base.rel_tol,
                                 abs_tol=base.abs_tol, max_step=max_step,
                                 norm_cap=base.norm_cap)
    total = transient + refine * window
    try:
        traj = integrate(sys, x0, total, direction, run_opts)
    except BlowUp as exc:
        if direction is Direction.BACKWARD:
            raise AlphaUnbounded(exc.t_reached) from exc
        raise
    clouds = []
    for k in range(refine):
        lo = transient + k * window
        hi = lo + window
        sel = (traj.times >= lo - 1e-12) & (traj.times <= hi + 1e-12)
        pts = traj.states[sel]
        if len(pts) > max_points_per_window:
            stride = int(np.ceil(len(pts) / max_points_per_window))
            pts = pts[::stride]
        if len(pts) == 0:
            raise DimensionMismatch("window produced no samples; reduce max_step")
        clouds.append(pts)
    gap = _hausdorff(clouds[-1], clouds[-2])
    return LimitSetEstimate(points=clouds[-1], direction=direction,
                            seed_state=np.asarray(x0, dtype=float),
                            transient_time=transient, sample_window=window,
                            hausdorff_gap=gap, converged=gap <= gap_threshold)


def non_ordering_check(points: np.ndarray, cone: Cone,
                       margin: float = 1e-6) -> NonOrderingReport:
    """Search a cloud for cone-ordered pairs.

    ok is True iff no pair is strictly interior-ordered with every defining
    slack above ``margin``; strict (boundary) pairs are counted separately
    for the cycle check.  worst_pair maximizes the minimum slack over both
    orientations, i.e. the pair closest to being interior-ordered.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        raise DimensionMismatch("need at least two points")
    m = len(pts)
    interior = 0
    strict = 0
    worst = -np.inf
    worst_pair = None
    for i in range(m - 1):
        d = pts[i + 1:] - pts[i]
        slacks = cone.slacks(d)
        smin = slacks.min(axis=1)
        smax = slacks.max(axis=1)
        absmax = np.abs(d).max(axis=1)
        # orderedness score: min slack of the better orientation (the
        # reverse orientation's min slack is -smax); near-equal pairs are
        # excluded so duplicates cannot pose as ordered pairs
        distinct = absmax > margin
        best = np.where(distinct, np.maximum(smin, -smax), -np.inf)
        k = int(np.argmax(best))
        if best[k] > worst:
            worst = float(best[k])
            if best[k] > margin:
                rel = "strict_interior"
            elif best[k] >= -margin:
                rel = "strict"
            else:
                rel = "incomparable"
            worst_pair = (i, i + 1 + k, rel)
        interior += int(np.count_nonzero(distinct & ((smin > margin) | (smax < -margin))))
        s_fwd = distinct & (smin >= -margin) & ~(smin > margin)
        s_rev = distinct & (smax <= margin) & ~(smax < -margin)
        strict += int(np.count_nonzero(s_fwd | s_rev))
    return NonOrderingReport(ok=interior == 0, worst_pair=worst_pair,
                             worst_min_slack=worst, interior_pairs=interior,
                             strict_pairs=strict,
                             pairs_checked=m * (m - 1) // 2)


def interior_direction(cone: Cone) -> np.ndarray:
    """Default projection direction: the cone's certified interior unit
    vector (for the positive orthant this is (1,...,1)/sqrt(N))."""
    return cone.interior_point.copy()


def project_and_check(points: np.ndarray, cone: Cone,
                      v: np.ndarray | None = None) -> ProjectionReport:
    """Project the cloud onto the hyperplane orthogonal to v and certify
    sample-level injectivity.

    v must satisfy every defining inequality of the cone strictly.  The
    margin is min over pairs of |proj(p) - proj(q)| / |p - q| (pairs closer
    than 1e-9 are skipped); a positive value certifies the projection is
    one-to-one on the sample.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        raise DimensionMismatch("need at least two points")
    if v is None:
        v = interior_direction(cone)
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    if np.min(cone.slacks(v)) <= 0:
        raise VNotInterior("projection direction is not strictly inside the cone")
    n = cone.dimension
    # orthonormal basis of v-perp via QR of [v | I]
    q, _ = np.linalg.qr(np.column_stack([v, np.eye(n)]))
    basis = q[:, 1:n]
    # fix sign convention for determinism
    signs = np.sign(basis.sum(axis=0))
    signs[signs == 0] = 1.0
    basis = basis * signs
    projected = pts @ basis
    margin = np.inf
    for i in range(len(pts) - 1):
        d = pts[i + 1:] - pts[i]
        norms = np.linalg.norm(d, axis=1)
        keep = norms >= 1e-9
        if not np.any(keep):
            continue
        pd = np.linalg.norm(d[keep] @ basis, axis=1)
        margin = min(margin, float(np.min(pd / norms[keep])))
    if margin is np.inf:
        margin = 0.0
    return ProjectionReport(projected=projected, injectivity_margin=float(margin),
                            direction=v)


def theta_projection(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """x minus its component along v (v a unit vector)."""
    x = np.asarray(x, dtype=float)
    return x - np.dot(x, v) * v


def _medoids(points: np.ndarray, count: int = 8) -> list[np.ndarray]:
    """Deterministic seeds: split the (time-ordered) cloud into chunks and
    take each chunk's point of minimal summed distance."""
    chunks = np.array_split(points, min(count, len(points)))
    out = []
    for chunk in chunks:
        if len(chunk) == 0:
            continue
        d = np.linalg.norm(chunk[:, None, :] - chunk[None, :, :], axis=2).sum(axis=1)
        out.append(chunk[int(np.argmin(d))])
    return out


def _newton_equilibrium(sys: SystemDef, x0: np.ndarray,
                        max_iter: int = 50) -> np.ndarray | None:
    x = x0.astype(float).copy()
    for _ in range(max_iter):
        try:
            f = eval_field(sys, x)
        except Exception:
            return None
        if not np.all(np.isfinite(f)):
            return None
        if np.linalg.norm(f) < EQUILIBRIUM_RESIDUAL:
            return x
        try:
            step = np.linalg.lstsq(jacobian(sys, x), -f, rcond=None)[0]
        except Exception:
            return None
        if not np.all(np.isfinite(step)):
            return None
        x = x + step
        if np.linalg.norm(x) > 1e12:
            return None
    try:
        if np.linalg.norm(eval_field(sys, x)) < EQUILIBRIUM_RESIDUAL:
            return x
    except Exception:
        return None
    return None


def _find_equilibrium_near(sys: SystemDef, est: LimitSetEstimate) -> np.ndarray | None:
    # an equilibrium belonging to the limit set has cloud samples
    # accumulating onto it (the flow dwells there), so require it to sit
    # within a small fraction of the diameter of some sample; a diameter
    # away (e.g. the center of a cycle) is not membership
    tol = max(0.05 * est.diameter, POINT_CLOUD_EPS)
    for seed in _medoids(est.points):
        x = _newton_equilibrium(sys, seed)
        if x is None:
            continue
        dist = float(np.min(np.linalg.norm(est.points - x, axis=1)))
        if dist <= tol:
            return x
    return None


def _first_return_period(sys: SystemDef, est: LimitSetEstimate,
                         opts: IntegratorOptions):
    """Period estimate by first return to a section through the barycenter.

    The section passes through the cloud barycenter with normal along the
    flow at the cloud point nearest the barycenter; crossings in the
    positive direction are refined by bisection to 1e-10 in time.
    Returns (period, anchor_point, recurrence_error) or None.
    """
    c = est.barycenter()
    q = est.points[int(np.argmin(np.linalg.norm(est.points - c, axis=1)))]
    fq = eval_field(sys, q)
    nrm = np.linalg.norm(fq)
    if nrm == 0:
        return None
    normal = fq / nrm

    horizon = max(4.0 * est.sample_window, 1.0)
    step_cap = est.sample_window / 400
    run_opts = IntegratorOptions(method="dp54", rel_tol=opts.rel_tol,
                                 abs_tol=opts.abs_tol, max_step=step_cap,
                                 norm_cap=opts.norm_cap)
    traj = integrate(sys, q, horizon, Direction.FORWARD, run_opts)
    g = (traj.states - c) @ normal
    ups = np.nonzero((g[:-1] < 0) & (g[1:] >= 0))[0]
    if len(ups) < 2:
        return None

    def refine(k):
        lo, hi = traj.times[k], traj.times[k + 1]
        xlo = traj.states[k]
        glo = g[k]
        while hi - lo > 1e-10:
            mid = 0.5 * (lo + hi)
            seg = integrate(sys, xlo, mid - lo, Direction.FORWARD,
                            IntegratorOptions(method="dp54", rel_tol=opts.rel_tol,
                                              abs_tol=opts.abs_tol,
                                              norm_cap=opts.norm_cap))
            xm = seg.states[-1]
            gm = float((xm - c) @ normal)
            if (glo < 0) == (gm < 0):
                lo, xlo, glo = mid, xm, gm
            else:
                hi = mid
        return lo, xlo

    t1, p1 = refine(ups[0])
    t2, _ = refine(ups[1])
    period = t2 - t1
    if period <= 0:
        return None
    back = integrate(sys, p1, period, Direction.FORWARD,
                     IntegratorOptions(method="dp54", rel_tol=opts.rel_tol,
                                       abs_tol=opts.abs_tol, norm_cap=opts.norm_cap))
    rec = float(np.linalg.norm(back.states[-1] - p1))
    return float(period), p1, rec


def classify_limit_set(sys: SystemDef, est: LimitSetEstimate,
                       cone: Cone | None = None,
                       opts: IntegratorOptions | None = None) -> LimitSetClass:
    """Equilibrium / contains-equilibrium / periodic-orbit / inconclusive.

    An equilibrium with residual below 1e-9 within cloud-diameter distance
    always precludes the periodic verdict.  The periodic branch (3-space
    only) requires the first-return recurrence error to be below
    1e-4 * cloud diameter.
    """
    opts = opts or IntegratorOptions()
    eq = _find_equilibrium_near(sys, est)
    dia = est.diameter
    if eq is not None:
        if dia < POINT_CLOUD_EPS:
            return LimitSetClass("equilibrium", point=eq,
                                 evidence={"residual": float(np.linalg.norm(eval_field(sys, eq))),
                                           "diameter": dia})
        return LimitSetClass("contains_equilibrium", point=eq,
                             evidence={"residual": float(np.linalg.norm(eval_field(sys, eq))),
                                       "diameter": dia})
    if sys.dimension != 3:
        return LimitSetClass("inconclusive",
                             evidence={"reason": "periodic verdict restricted to 3-space",
                                       "diameter": dia})
    ret = _first_return_period(sys, est, opts)
    if ret is None:
        return LimitSetClass("inconclusive", evidence={"reason": "no clean first return",
                                                       "diameter": dia})
    period, p1, rec = ret
    if rec < RECURRENCE_FACTOR * dia:
        return LimitSetClass("periodic_orbit", point=p1, period=period,
                             evidence={"recurrence_error": rec, "diameter": dia})
    return LimitSetClass("inconclusive",
                         evidence={"reason": "recurrence error too large",
                                   "recurrence_error": rec, "period_estimate": period,
                                   "diameter": dia})


def spectrum_at_equilibrium(sys: SystemDef, x) -> SpectrumReport:
    """Eigenvalues of the linearization; hyperbolic iff the spectrum stays
    off the imaginary axis by more than 1e-6."""
    x = np.asarray(x, dtype=float)
    res = float(np.linalg.norm(eval_field(sys, x)))
    if res >= EQUILIBRIUM_RESIDUAL:
        raise NotEquilibrium(f"residual {res:.3g} exceeds {EQUILIBRIUM_RESIDUAL}")
    vals = np.linalg.eigvals(jacobian(sys, x))
    margin = float(np.min(np.abs(vals.real)))
    return SpectrumReport(at={"kind": "equilibrium", "point": x.tolist()},
                          values=vals, hyperbolic=margin > SPECTRUM_MARGIN,
                          margin=margin)


def floquet_multipliers(sys: SystemDef, point_on_cycle, period: float,
                        rel_tol: float = 1e-11, abs_tol: float = 1e-13) -> SpectrumReport:
    """Multipliers of the cycle through the given point.

    Integrates the matrix variational system along the orbit over one
    period (augmented state), eigen-decomposes the resulting monodromy
    matrix, designates the multiplier closest to 1 as trivial, and reports
    hyperbolicity of the rest against the unit circle with margin 1e-3.
    The determinant identity det(M) = exp(integral of trace J) is recorded
    as ``liouville_residual`` (relative).
    """
    p = np.asarray(point_on_cycle, dtype=float)
    if period <= 0:
        raise NotPeriodic("period must be positive")
    n = sys.dimension
    check = integrate(sys, p, period, Direction.FORWARD,
                      IntegratorOptions(method="dp54", rel_tol=rel_tol,
                                        abs_tol=abs_tol))
    closure = float(np.linalg.norm(check.states[-1] - p))
    if closure >= 1e-4:
        raise NotPeriodic(f"orbit misses its start by {closure:.3g} after one period")

    def rhs(t, z):
        x = z[:n]
        X = z[n:n + n * n].reshape(n, n)
        jac = jacobian(sys, x)
        return np.concatenate([eval_field(sys, x), (jac @ X).ravel(),
                               [np.trace(jac)]])

    z0 = np.concatenate([p, np.eye(n).ravel(), [0.0]])
    traj = integrate(sys, z0, period, Direction.FORWARD,
                     IntegratorOptions(method="dp54", rel_tol=rel_tol,
                                       abs_tol=abs_tol, norm_cap=1e12),
                     rhs=rhs)
    zT = traj.states[-1]
    monodromy = zT[n:n + n * n].reshape(n, n)
    trace_integral = float(zT[-1])
    det = float(np.linalg.det(monodromy))
    liouville = abs(det - np.exp(trace_integral)) / max(abs(np.exp(trace_integral)), 1e-300)

    vals = np.linalg.eigvals(monodromy)
    trivial = int(np.argmin(np.abs(vals - 1.0)))
    others = np.delete(vals, trivial)
    trivial_err = float(np.abs(vals[trivial] - 1.0))
    note = ""
    if trivial_err > TRIVIAL_MULTIPLIER_TOL:
        hyperbolic = False
        margin = 0.0
        note = (f"trivial multiplier off the unit value by {trivial_err:.3g}; "
                "cycle data too inaccurate to judge hyperbolicity")
    else:
        margin = float(np.min(np.abs(np.abs(others) - 1.0))) if others.size else np.inf
        hyperbolic = bool(margin > HYPERBOLIC_MARGIN)
    order = np.argsort(-np.abs(vals))
    return SpectrumReport(at={"kind": "cycle", "point": p.tolist(), "period": period},
                          values=vals[order], hyperbolic=hyperbolic, margin=margin,
                          note=note, liouville_residual=float(liouville))
