"""Shared frozen instances.

The three-species competitive Lotka-Volterra cycle instances below were
located by tuning an all-negative interaction Jacobian to a slightly
supercritical complex pair and confirming a clean attracting cycle by long
high-accuracy integration (recurrence error < 1e-11, period spread < 1e-9).
The seeds are points essentially on each cycle, and the periods are the
measured first-return times (loose reference values; tests re-derive them).
"""

import numpy as np
import pytest

from monoflow.systems import expression_system, linear_system, lotka_volterra_system

# competitive LV instances with attracting limit cycles: (M, r, seed, approx period)
LV_CYCLE_INSTANCES = [
    (
        [[-0.7453, -0.5391, -0.2699],
         [-0.1793, -0.6541, -0.8746],
         [-2.5504, -1.9346, -1.1884]],
        [1.5818, 1.5325, 5.6797],
        [0.862626, 1.35139, 0.637134],
        57.04,
    ),
    (
        [[-0.9309, -1.3461, -2.0298],
         [-1.3145, -1.3167, -0.4166],
         [-0.5049, -0.8354, -0.7238]],
        [4.8634, 3.0721, 2.2754],
        [0.034172, 1.854245, 1.241994],
        22.23,
    ),
    (
        [[-0.9920, -1.2873, -1.4538],
         [-0.7604, -0.6971, -0.1953],
         [-0.5655, -1.0501, -0.7785]],
        [4.7968, 2.1097, 3.1289],
        [1.111728, 0.143369, 2.802918],
        19.77,
    ),
]

# non-Metzler matrix whose propagator becomes entrywise positive after a
# transient: spectrum {1, -0.201, -2.0067} with positive dominant left and
# right eigenvectors; one strongly negative off-diagonal entry
EVENTUALLY_POSITIVE_MATRIX = np.array([
    [0.697478, 0.843584, 0.192113],
    [-1.01155, -1.00099, 1.712062],
    [1.314072, 1.157407, -0.904175],
])

# cyclic three-species competition whose attractor is the boundary
# heteroclinic cycle through the three single-species equilibria
MAY_LEONARD_ALPHA = 1.7
MAY_LEONARD_BETA = 0.5

PLANAR_CYCLE_FIELD = ["x1*(1 - x1^2 - x2^2) - x2",
                      "x2*(1 - x1^2 - x2^2) + x1"]
EMBEDDED_CYCLE_FIELD = PLANAR_CYCLE_FIELD + ["-x3"]


def lv_cycle_system(k: int):
    m, r, _, _ = LV_CYCLE_INSTANCES[k]
    return lotka_volterra_system(r, m, label=f"lv-cycle-{k}")


def lv_cycle_seed(k: int) -> np.ndarray:
    return np.array(LV_CYCLE_INSTANCES[k][2])


def lv_cycle_period(k: int) -> float:
    return LV_CYCLE_INSTANCES[k][3]


def may_leonard_system(alpha: float = MAY_LEONARD_ALPHA,
                       beta: float = MAY_LEONARD_BETA):
    m = [[-1.0, -alpha, -beta],
         [-beta, -1.0, -alpha],
         [-alpha, -beta, -1.0]]
    return lotka_volterra_system([1.0, 1.0, 1.0], m, label="may-leonard")


@pytest.fixture(scope="session")
def planar_cycle():
    return expression_system(PLANAR_CYCLE_FIELD, label="planar-cycle")


@pytest.fixture(scope="session")
def embedded_cycle():
    return expression_system(EMBEDDED_CYCLE_FIELD, label="embedded-cycle")


@pytest.fixture(scope="session")
def sink3():
    return expression_system(["-x1", "-x2", "-x3"], label="sink")


def random_metzler(rng: np.random.Generator, n: int = 3,
                   radius: float = 0.15) -> np.ndarray:
    m = rng.uniform(0.0, 1.0, (n, n))
    m[np.diag_indices(n)] = rng.uniform(-1.0, 0.0, n)
    rho = max(np.abs(np.linalg.eigvals(m)))
    return m * (radius / max(rho, 1e-9))


def make_linear(matrix, cone=None):
    return linear_system(matrix, cone)
