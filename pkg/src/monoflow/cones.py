"""Solid convex cones and the partial orders they induce.

A cone is stored either as a signed orthant or as a polyhedral cone in
half-space form (a list of inward normals h_j; membership is
``<h_j, x> >= 0`` for all j).  The induced relations between vectors x, y
are classified from the difference d = y - x:

* ``Equal``            -- d is (numerically) zero,
* ``StrictInterior``   -- d lies strictly inside the cone (x << y),
* ``Strict``           -- d lies in the cone, nonzero, but on its boundary
                          within tolerance (x < y but not x << y),
* ``Incomparable``     -- otherwise.

V-representation (generator) input is deliberately not accepted: half-space
form makes every membership test a direct inner product.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, NonSolidCone, NotPointed

_SOLIDITY_SLACK = 1e-9


class OrderRelation(enum.Enum):
    EQUAL = "equal"
    STRICT_INTERIOR = "strict_interior"
    STRICT = "strict"
    INCOMPARABLE = "incomparable"

    @property
    def is_ordered(self) -> bool:
        """True for any relation asserting x <= y."""
        return self is not OrderRelation.INCOMPARABLE


@dataclass(frozen=True)
class Cone:
    """A validated solid, pointed convex cone in R^N.

    ``signs`` is set for orthant cones; ``normals`` holds unit inward
    normals (rows) for polyhedral cones.  Exactly one of the two is set.
    ``interior_point`` is a unit vector certified to satisfy every defining
    inequality with positive slack.
    """

    dimension: int
    signs: np.ndarray | None = None
    normals: np.ndarray | None = None
    interior_point: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    @property
    def kind(self) -> str:
        return "orthant" if self.signs is not None else "polyhedral"

    def slacks(self, d: np.ndarray) -> np.ndarray:
        """Values of the defining inequalities at d (all >= 0 iff d in C).

        For a batch input of shape (m, N) returns shape (m, k).
        """
        d = np.asarray(d, dtype=float)
        if d.shape[-1] != self.dimension:
            raise DimensionMismatch(
                f"vector has dimension {d.shape[-1]}, cone has {self.dimension}")
        if self.signs is not None:
            return d * self.signs
        return d @ self.normals.T

    def contains(self, d: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.all(self.slacks(d) >= -tol))

    def to_json(self) -> dict:
        if self.signs is not None:
            return {"type": "orthant", "signs": [int(s) for s in self.signs]}
        return {"type": "polyhedral", "normals": self.normals.tolist()}


def positive_orthant(dimension: int) -> Cone:
    return validate_cone({"type": "orthant", "signs": [1] * dimension})


def _interior_point_polyhedral(normals: np.ndarray) -> np.ndarray:
    """Find a unit vector with positive slack on every normal.

    First candidate is the normalized mean of the (unit) normals, which is
    interior for acute cones.  If that fails, maximize the minimum slack
    over the unit box by linear programming and normalize the solution.
    """
    n_dim = normals.shape[1]
    cand = normals.mean(axis=0)
    norm = np.linalg.norm(cand)
    if norm > 0:
        cand = cand / norm
        if np.min(normals @ cand) > _SOLIDITY_SLACK:
            return cand
    # LP: maximize s  s.t.  normals @ x >= s,  -1 <= x <= 1
    m = normals.shape[0]
    c = np.zeros(n_dim + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-normals, np.ones((m, 1))])
    b_ub = np.zeros(m)
    bounds = [(-1.0, 1.0)] * n_dim + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success or res.x[-1] <= _SOLIDITY_SLACK:
        raise NonSolidCone(
            "no strictly interior point found (max min-slack "
            f"{res.x[-1] if res.success else float('nan'):.3g})")
    x = res.x[:n_dim]
    return x / np.linalg.norm(x)


def validate_cone(spec: dict) -> Cone:
    """Build a Cone from its JSON fragment, verifying all invariants.

    Orthant form: ``{"type": "orthant", "signs": [1, -1, ...]}``.
    Polyhedral form: ``{"type": "polyhedral", "normals": [[...], ...]}``;
    needs at least N normals spanning R^N (pointedness) and a strictly
    feasible direction (solidity).
    """
    kind = spec.get("type")
    if kind == "orthant":
        signs = np.asarray(spec["signs"], dtype=float)
        if signs.ndim != 1 or signs.size < 1:
            raise DimensionMismatch("orthant signs must be a nonempty vector")
        if not np.all(np.abs(signs) == 1):
            raise DimensionMismatch(f"orthant signs must be +1/-1, got {signs}")
        n = signs.size
        return Cone(dimension=n, signs=signs, interior_point=signs / np.sqrt(n))
    if kind == "polyhedral":
        normals = np.asarray(spec["normals"], dtype=float)
        if normals.ndim != 2 or normals.shape[0] < 1:
            raise DimensionMismatch("normals must be a nonempty list of vectors")
        n = normals.shape[1]
        if n < 1:
            raise DimensionMismatch("dimension must be at least 1")
        if normals.shape[0] < n:
            raise NotPointed(
                f"{normals.shape[0]} normals cannot pin down a pointed cone in R^{n}")
        norms = np.linalg.norm(normals, axis=1)
        if np.any(norms == 0):
            raise DimensionMismatch("zero normal vector")
        normals = normals / norms[:, None]
        if np.linalg.matrix_rank(normals, tol=1e-12) < n:
            raise NotPointed("normals do not span the space; C ∩ -C is nontrivial")
        interior = _interior_point_polyhedral(normals)
        return Cone(dimension=n, normals=normals, interior_point=interior)
    raise DimensionMismatch(f"unknown cone type {kind!r}")


def order_relation(cone: Cone, x: np.ndarray, y: np.ndarray,
                   tol: float = 0.0) -> OrderRelation:
    """Classify the relation of x to y under the cone order.

    Reports the forward relation only; callers test the reverse by swapping
    arguments.  ``tol`` widens every comparison for sampled data (keep it 0
    for exact inputs).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (cone.dimension,) or y.shape != (cone.dimension,):
        raise DimensionMismatch(
            f"expected vectors of dimension {cone.dimension}, got {x.shape} and {y.shape}")
    d = y - x
    if np.linalg.norm(d) <= tol:
        return OrderRelation.EQUAL
    s = cone.slacks(d)
    if np.all(s > tol):
        return OrderRelation.STRICT_INTERIOR
    if np.all(s >= -tol) and np.max(np.abs(d)) > tol:
        return OrderRelation.STRICT
    return OrderRelation.INCOMPARABLE


def relation_from_slacks(slacks: np.ndarray, d_absmax: float, d_norm: float,
                         tol: float) -> OrderRelation:
    """Same classification as :func:`order_relation` from precomputed slacks.

    Lets vectorized scanners classify batches without rebuilding arrays.
    """
    if d_norm <= tol:
        return OrderRelation.EQUAL
    if np.all(slacks > tol):
        return OrderRelation.STRICT_INTERIOR
    if np.all(slacks >= -tol) and d_absmax > tol:
        return OrderRelation.STRICT
    return OrderRelation.INCOMPARABLE
