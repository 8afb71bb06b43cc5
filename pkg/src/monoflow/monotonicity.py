"""Certification of (eventual) order preservation by a flow.

Linear systems get an exact route: a Metzler sign pattern certifies
cooperativity outright (competitivity for -A), and otherwise a
Perron-Frobenius-type spectral test (real simple dominant eigenvalue with
entrywise-positive left and right eigenvectors) flags candidates whose
propagator e^{tA} becomes and stays entrywise positive after a transient;
the transient itself is located by a grid scan of e^{tA}.

Nonlinear systems get a sampling route: integrate ordered pairs forward and
backward, record when the order relation last fails, and report the
direction that settles.  Sampled certificates are evidence, never proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .cones import Cone
from .errors import BlowUp, DomainError, EigenFailure, SamplingFailure, UnsupportedCone
from .integrate import Direction, IntegratorOptions, integrate
from .systems import SystemDef, jacobian

DEFAULT_GRID = 1024
_EIG_TOL = 1e-9


class CertificateKind:
    COOPERATIVE_IMMEDIATE = "cooperative_immediate"
    COMPETITIVE_IMMEDIATE = "competitive_immediate"
    EVENTUALLY_COOPERATIVE = "eventually_cooperative"
    EVENTUALLY_COMPETITIVE = "eventually_competitive"
    NOT_DETECTED = "not_detected"


_COOPERATIVE_KINDS = (CertificateKind.COOPERATIVE_IMMEDIATE,
                      CertificateKind.EVENTUALLY_COOPERATIVE)
_COMPETITIVE_KINDS = (CertificateKind.COMPETITIVE_IMMEDIATE,
                      CertificateKind.EVENTUALLY_COMPETITIVE)


@dataclass(frozen=True)
class MonotonicityCertificate:
    kind: str
    tstar_estimate: float | None
    strong: bool = False
    tau_star_estimate: float | None = None
    evidence: dict = field(default_factory=dict)

    @property
    def detected(self) -> bool:
        return self.kind != CertificateKind.NOT_DETECTED

    @property
    def cooperative(self) -> bool:
        return self.kind in _COOPERATIVE_KINDS

    @property
    def competitive(self) -> bool:
        return self.kind in _COMPETITIVE_KINDS

    def to_json(self, pairs: int | None = None, violations: int | None = None) -> dict:
        return {
            "kind": self.kind,
            "tstar": self.tstar_estimate,
            "strong": self.strong,
            "tau_star": self.tau_star_estimate,
            "pairs": pairs if pairs is not None else self.evidence.get("pairs"),
            "violations": violations if violations is not None
                          else self.evidence.get("violations"),
        }


@dataclass(frozen=True)
class OrderPreservationReport:
    violations: int
    worst_margin: float
    trials: int
    dropped: int = 0


def _orthant_conjugated(matrix: np.ndarray, cone: Cone) -> np.ndarray:
    """Reduce a general orthant to the positive one: D A D with D = diag(signs)."""
    if cone.signs is None:
        raise UnsupportedCone("linear certification supports orthant cones only")
    d = cone.signs
    return matrix * np.outer(d, d)


def is_metzler(matrix: np.ndarray, tol: float = 0.0) -> bool:
    off = matrix.copy()
    np.fill_diagonal(off, 0.0)
    return bool(np.all(off >= -tol))


def _strong_perron(matrix: np.ndarray) -> bool:
    """Real simple dominant eigenvalue with positive right and left
    eigenvectors (after sign normalization)."""
    try:
        vals, vecs = np.linalg.eig(matrix)
        lvals, lvecs = np.linalg.eig(matrix.T)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    k = int(np.argmax(vals.real))
    lam = vals[k]
    if abs(lam.imag) > _EIG_TOL:
        return False
    others = np.delete(vals, k)
    if others.size and np.max(others.real) >= lam.real - _EIG_TOL:
        return False  # not strictly dominant (or not simple)
    kl = int(np.argmin(np.abs(lvals - lam)))
    if abs(lvals[kl] - lam) > 1e-6 * max(1.0, abs(lam)):
        return False
    for v in (vecs[:, k], lvecs[:, kl]):
        v = np.real_if_close(v, tol=1e6)
        v = np.real(v)
        if abs(v.sum()) < _EIG_TOL:
            return False
        v = v * np.sign(v.sum())
        if np.min(v) <= _EIG_TOL:
            return False
    return True


def _positivity_threshold(matrix: np.ndarray, horizon: float, grid: int) -> float | None:
    """Right endpoint of the first grid cell after which every entry of
    e^{tA} stays positive through the horizon, or None if the final grid
    point still has a non-positive entry."""
    ts = np.linspace(0.0, horizon, grid + 1)[1:]
    positive = np.array([bool(np.all(scipy.linalg.expm(t * matrix) > 0)) for t in ts])
    if not positive[-1]:
        return None
    idx = int(np.nonzero(~positive)[0][-1] + 1) if not positive.all() else 0
    return float(ts[idx])


def certify_linear(matrix, cone: Cone, horizon: float = 50.0,
                   grid: int = DEFAULT_GRID) -> MonotonicityCertificate:
    """Classify the linear flow e^{tA} under an orthant cone.

    Metzler sign pattern of the (sign-conjugated) matrix gives an immediate
    certificate with t* = 0.  Otherwise the spectral test plus the e^{tA}
    entrywise scan decides the eventual kinds; NOT_DETECTED means neither A
    nor -A passed.
    """
    matrix = np.asarray(matrix, dtype=float)
    conj = _orthant_conjugated(matrix, cone)
    if is_metzler(conj):
        return MonotonicityCertificate(
            CertificateKind.COOPERATIVE_IMMEDIATE, 0.0,
            evidence={"method": "metzler sign pattern"})
    if is_metzler(-conj):
        return MonotonicityCertificate(
            CertificateKind.COMPETITIVE_IMMEDIATE, 0.0,
            evidence={"method": "metzler sign pattern of negation"})
    for cand, kind in ((conj, CertificateKind.EVENTUALLY_COOPERATIVE),
                       (-conj, CertificateKind.EVENTUALLY_COMPETITIVE)):
        if _strong_perron(cand):
            tstar = _positivity_threshold(cand, horizon, grid)
            if tstar is not None:
                return MonotonicityCertificate(
                    kind, tstar,
                    evidence={"method": "dominant-eigenpair test + propagator scan",
                              "horizon": horizon, "grid": grid})
    return MonotonicityCertificate(CertificateKind.NOT_DETECTED, None,
                                   evidence={"method": "no route succeeded"})


def jacobian_sign_certificate(sys: SystemDef, box, points: int = 10000,
                              seed: int = 0) -> MonotonicityCertificate:
    """Sample off-diagonal Jacobian signs over a box.

    All off-diagonals >= -1e-12 at every sample certifies (sampled)
    cooperativity with t* = 0; all <= 1e-12 competitivity.  Orthant signs
    are conjugated away first.
    """
    if sys.cone.signs is None:
        raise UnsupportedCone("sign scan supports orthant cones only")
    lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(11,)))
    d = np.outer(sys.cone.signs, sys.cone.signs)
    off_min, off_max = np.inf, -np.inf
    mask = ~np.eye(sys.dimension, dtype=bool)
    for _ in range(points):
        x = rng.uniform(lo, hi)
        off = (jacobian(sys, x) * d)[mask]
        off_min = min(off_min, float(off.min()))
        off_max = max(off_max, float(off.max()))
    evidence = {"method": "jacobian off-diagonal sign scan",
                "points": points, "off_min": off_min, "off_max": off_max}
    if off_min >= -1e-12:
        return MonotonicityCertificate(
            CertificateKind.COOPERATIVE_IMMEDIATE, 0.0, evidence=evidence)
    if off_max <= 1e-12:
        return MonotonicityCertificate(
            CertificateKind.COMPETITIVE_IMMEDIATE, 0.0, evidence=evidence)
    return MonotonicityCertificate(CertificateKind.NOT_DETECTED, None,
                                   evidence=evidence)


def _sample_ordered_pair(cone: Cone, lo, hi, rng):
    """x uniform in the box; y = x + d with d a random cone direction of
    norm in [1e-3, 1]."""
    x = rng.uniform(lo, hi)
    if cone.signs is not None:
        w = rng.uniform(0.0, 1.0, cone.dimension)
        d = w * cone.signs
    else:
        # blend a random direction toward the certified interior point until
        # it enters the cone
        u = rng.normal(size=cone.dimension)
        u /= np.linalg.norm(u)
        d = None
        beta = 1.0
        for _ in range(60):
            cand = beta * u + (1 - beta) * cone.interior_point
            if cone.contains(cand, tol=0.0) and np.linalg.norm(cand) > 0:
                d = cand
                break
            beta *= 0.5
        if d is None:
            d = cone.interior_point.copy()
    d = d / np.linalg.norm(d) * rng.uniform(1e-3, 1.0)
    return x, x + d


def _pair_grid_states(sys: SystemDef, x, y, horizon: float, samples: int,
                      direction: Direction, norm_cap: float):
    opts = IntegratorOptions(method="rk4", step=horizon / samples, norm_cap=norm_cap)
    tx = integrate(sys, x, horizon, direction, opts)
    ty = integrate(sys, y, horizon, direction, opts)
    return tx.times, tx.states, ty.states


def estimate_tstar_empirical(sys: SystemDef, pairs: int = 200,
                             horizon: float = 10.0, seed: int = 0,
                             box=None, samples: int = DEFAULT_GRID,
                             tol: float = 1e-9,
                             norm_cap: float = 1e9) -> MonotonicityCertificate:
    """Sampled transient estimate for order preservation.

    For each ordered pair x <= y the forward and backward flows are sampled
    on a uniform grid; per direction we record the last grid time at which
    the order fails.  A direction certifies when every pair is clear before
    the final grid cell; the reported t* is the right endpoint of the first
    all-clear cell (max over pairs).  The strong variant tracks when the
    relation becomes and stays strictly interior, reported as tau*.
    """
    if box is None:
        box = (np.zeros(sys.dimension), np.ones(sys.dimension))
    lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    grid_dt = horizon / samples

    stats = {}
    dropped = {Direction.FORWARD: 0, Direction.BACKWARD: 0}
    for direction in (Direction.FORWARD, Direction.BACKWARD):
        last_fail = 0.0       # last grid time with an order failure (any pair)
        last_weak = 0.0       # last grid time not strictly interior
        fail_count = 0
        used = 0
        final_clear = True
        tau_settles = True
        rng_dir = np.random.default_rng(np.random.SeedSequence(
            entropy=seed, spawn_key=(0 if direction is Direction.FORWARD else 1,)))
        for _ in range(pairs):
            x, y = _sample_ordered_pair(sys.cone, lo, hi, rng_dir)
            try:
                times, sx, sy = _pair_grid_states(sys, x, y, horizon, samples,
                                                  direction, norm_cap)
            except (BlowUp, DomainError):
                dropped[direction] += 1
                continue
            used += 1
            slacks = sys.cone.slacks(sy - sx)
            ordered = slacks.min(axis=1) >= -tol
            interior = (slacks > tol).all(axis=1)
            bad = np.nonzero(~ordered)[0]
            if bad.size:
                fail_count += int(bad.size)
                last_fail = max(last_fail, float(times[bad[-1]]))
                if bad[-1] == len(times) - 1:
                    final_clear = False
            weak = np.nonzero(~interior)[0]
            if weak.size:
                if weak[-1] == len(times) - 1:
                    tau_settles = False
                else:
                    last_weak = max(last_weak, float(times[weak[-1]]))
        stats[direction] = {
            "used": used, "failures": fail_count, "final_clear": final_clear,
            "tstar": min(last_fail + grid_dt, horizon) if fail_count else 0.0,
            "tau": min(last_weak + grid_dt, horizon) if tau_settles else None,
            "certifies": final_clear and used > 0,
        }
        if pairs > 0 and dropped[direction] > pairs // 2:
            raise SamplingFailure(
                f"{dropped[direction]}/{pairs} pairs dropped in {direction.value}")

    fwd, bwd = stats[Direction.FORWARD], stats[Direction.BACKWARD]
    evidence = {"method": "ordered-pair sampling", "pairs": pairs,
                "horizon": horizon, "grid": samples,
                "forward": fwd, "backward": bwd,
                "dropped": {d.value: k for d, k in dropped.items()}}

    if not fwd["certifies"] and not bwd["certifies"]:
        return MonotonicityCertificate(CertificateKind.NOT_DETECTED, None,
                                       evidence=evidence)
    if fwd["certifies"] and (not bwd["certifies"] or fwd["failures"] <= bwd["failures"]):
        chosen, coop = fwd, True
    else:
        chosen, coop = bwd, False
    tstar = chosen["tstar"]
    if coop:
        kind = (CertificateKind.COOPERATIVE_IMMEDIATE if tstar == 0.0
                else CertificateKind.EVENTUALLY_COOPERATIVE)
    else:
        kind = (CertificateKind.COMPETITIVE_IMMEDIATE if tstar == 0.0
                else CertificateKind.EVENTUALLY_COMPETITIVE)
    strong = chosen["tau"] is not None
    return MonotonicityCertificate(kind, tstar, strong=strong,
                                   tau_star_estimate=chosen["tau"],
                                   evidence=evidence)


def verify_order_preservation(sys: SystemDef, cert: MonotonicityCertificate,
                              trials: int = 500, horizon: float = 10.0,
                              seed: int = 1, box=None,
                              samples: int = DEFAULT_GRID, tol: float = 1e-9,
                              norm_cap: float = 1e9) -> OrderPreservationReport:
    """Independent re-sampling of a certificate's claim.

    Checks the certified order relation at all grid times in
    [t*, horizon]; a trial counts as a violation if any such time has a
    defining slack below -tol.  worst_margin is the most negative slack
    seen after t* (0 if every slack was clear).
    """
    if not cert.detected:
        raise SamplingFailure("cannot verify a NOT_DETECTED certificate")
    if box is None:
        box = (np.zeros(sys.dimension), np.ones(sys.dimension))
    lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    direction = Direction.FORWARD if cert.cooperative else Direction.BACKWARD
    tstar = cert.tstar_estimate or 0.0
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(7,)))
    violations = 0
    worst = 0.0
    dropped = 0
    used = 0
    for _ in range(trials):
        x, y = _sample_ordered_pair(sys.cone, lo, hi, rng)
        try:
            times, sx, sy = _pair_grid_states(sys, x, y, horizon, samples,
                                              direction, norm_cap)
        except (BlowUp, DomainError):
            dropped += 1
            continue
        used += 1
        after = times >= tstar - 1e-12
        slacks = sys.cone.slacks(sy[after] - sx[after])
        m = float(slacks.min())
        worst = min(worst, m)
        if m < -tol:
            violations += 1
    if trials > 0 and dropped > trials // 2:
        raise SamplingFailure(f"{dropped}/{trials} trials dropped")
    return OrderPreservationReport(violations=violations, worst_margin=worst,
                                   trials=used, dropped=dropped)
