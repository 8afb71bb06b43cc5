"""System definitions: a vector field, the cone ordering its state space,
and an optional declared order-preservation transient.

Three field kinds are supported:

* ``Expressions`` -- one parsed expression per component,
* ``Linear``      -- x' = M x,
* ``LotkaVolterra`` -- x_i' = x_i (r_i + sum_j A_ij x_j).

Jacobians are analytic for Linear and LotkaVolterra and central finite
differences (step 1e-6 * max(1, |x_i|) per column) for Expressions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import expressions as ex
from .cones import Cone, positive_orthant, validate_cone
from .errors import DimensionMismatch, DomainError, ParseError

FD_STEP = 1e-6


@dataclass(frozen=True)
class ExpressionField:
    trees: tuple[ex.Node, ...]
    sources: tuple[str, ...]


@dataclass(frozen=True)
class LinearField:
    matrix: np.ndarray


@dataclass(frozen=True)
class LotkaVolterraField:
    growth: np.ndarray       # r
    interactions: np.ndarray  # A


FieldSpec = ExpressionField | LinearField | LotkaVolterraField


@dataclass(frozen=True)
class SystemDef:
    dimension: int
    field: FieldSpec
    cone: Cone
    declared_tstar: float | None = None
    label: str = ""

    @property
    def is_linear(self) -> bool:
        return isinstance(self.field, LinearField)


def linear_system(matrix, cone: Cone | None = None, label: str = "") -> SystemDef:
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise DimensionMismatch(f"linear matrix must be square, got {matrix.shape}")
    return SystemDef(n, LinearField(matrix), cone or positive_orthant(n), label=label)


def lotka_volterra_system(growth, interactions, cone: Cone | None = None,
                          label: str = "") -> SystemDef:
    r = np.asarray(growth, dtype=float)
    a = np.asarray(interactions, dtype=float)
    n = r.size
    if a.shape != (n, n):
        raise DimensionMismatch(
            f"interaction matrix {a.shape} does not match growth vector of size {n}")
    return SystemDef(n, LotkaVolterraField(r, a), cone or positive_orthant(n),
                     label=label)


def expression_system(sources: list[str], cone: Cone | None = None,
                      declared_tstar: float | None = None,
                      label: str = "") -> SystemDef:
    n = len(sources)
    trees = tuple(ex.parse_expression(s, n) for s in sources)
    return SystemDef(n, ExpressionField(trees, tuple(sources)),
                     cone or positive_orthant(n), declared_tstar, label=label)


def parse_system(config: str | dict) -> SystemDef:
    """Build a SystemDef from its JSON description (text or parsed object).

    Top-level keys: ``dimension`` (optional when inferable), either
    ``field`` (list of expression strings) or ``family`` ("linear" with
    ``matrix``, or "lotka_volterra" with ``r`` and ``A``), optional
    ``cone`` fragment (default: positive orthant) and ``tstar``.
    """
    if isinstance(config, str):
        try:
            config = json.loads(config)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.pos, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(config, dict):
        raise ParseError(0, "system config must be a JSON object")

    declared = config.get("tstar")
    if declared is not None:
        declared = float(declared)
        if declared < 0:
            raise ParseError(0, "tstar must be nonnegative")

    if "field" in config:
        sources = config["field"]
        if not isinstance(sources, list) or not all(isinstance(s, str) for s in sources):
            raise ParseError(0, "'field' must be a list of expression strings")
        n = len(sources)
        trees = tuple(ex.parse_expression(s, n) for s in sources)
        fieldspec: FieldSpec = ExpressionField(trees, tuple(sources))
    elif config.get("family") == "linear":
        matrix = np.asarray(config["matrix"], dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch(f"linear matrix must be square, got {matrix.shape}")
        n = matrix.shape[0]
        fieldspec = LinearField(matrix)
    elif config.get("family") == "lotka_volterra":
        r = np.asarray(config["r"], dtype=float)
        a = np.asarray(config["A"], dtype=float)
        n = r.size
        if a.shape != (n, n):
            raise DimensionMismatch(
                f"interaction matrix {a.shape} does not match growth vector of size {n}")
        fieldspec = LotkaVolterraField(r, a)
    else:
        raise ParseError(0, "config needs either 'field' or a known 'family'")

    if "dimension" in config and int(config["dimension"]) != n:
        raise DimensionMismatch(
            f"declared dimension {config['dimension']} does not match field size {n}")

    cone = validate_cone(config["cone"]) if "cone" in config else positive_orthant(n)
    if cone.dimension != n:
        raise DimensionMismatch(
            f"cone dimension {cone.dimension} does not match system dimension {n}")
    return SystemDef(n, fieldspec, cone, declared, label=str(config.get("label", "")))


def eval_field(sys: SystemDef, x) -> np.ndarray:
    """F(x).  DomainError names the offending component where applicable."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sys.dimension,):
        raise DimensionMismatch(
            f"state has shape {x.shape}, system dimension is {sys.dimension}")
    f = sys.field
    if isinstance(f, LinearField):
        return f.matrix @ x
    if isinstance(f, LotkaVolterraField):
        return x * (f.growth + f.interactions @ x)
    out = np.empty(sys.dimension)
    for i, tree in enumerate(f.trees):
        try:
            out[i] = ex.evaluate(tree, x)
        except DomainError as exc:
            raise DomainError(str(exc), component=i) from exc
    if not np.all(np.isfinite(out)):
        bad = int(np.flatnonzero(~np.isfinite(out))[0])
        raise DomainError("non-finite field value", component=bad)
    return out


def jacobian(sys: SystemDef, x) -> np.ndarray:
    """dF/dx at x: exact for Linear/LotkaVolterra, central differences else."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sys.dimension,):
        raise DimensionMismatch(
            f"state has shape {x.shape}, system dimension is {sys.dimension}")
    f = sys.field
    if isinstance(f, LinearField):
        return f.matrix.copy()
    if isinstance(f, LotkaVolterraField):
        jac = x[:, None] * f.interactions
        jac[np.diag_indices(sys.dimension)] += f.growth + f.interactions @ x
        return jac
    n = sys.dimension
    jac = np.empty((n, n))
    for j in range(n):
        h = FD_STEP * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (eval_field(sys, xp) - eval_field(sys, xm)) / (2 * h)
    return jac
