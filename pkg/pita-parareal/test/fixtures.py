"""
Definition of shared test fixtures.
"""

import numpy as np

from pita.model import LTISystem
from pita.omega import OmegaSeries

# Second order system with eigenvalues -1 +- 5i and steady state (25/13, 5/13)
SIGMA_A = [[-1.0, 5.0], [-5.0, -1.0]]
SIGMA_B = [0.0, 1.0]
SIGMA_U = [10.0]
SIGMA_Y0 = [0.0, 1.0]


def sigma_system(y0=SIGMA_Y0):
    return LTISystem(SIGMA_A, SIGMA_B, SIGMA_U, y0)


def scalar_system(a, b=0.0, u=0.0, y0=1.0):
    return LTISystem([[a]], [b], [u], [y0])


def geometric(limit, a, r, count):
    """S_n = limit + a r^n"""
    return [limit + a * r ** n for n in range(count)]


def alternating_harmonic(count):
    """Partial sums S_n = sum_{i=1..n+1} (-1)^(i+1)/i, converging to ln 2."""
    signs = np.array([(-1.0) ** i for i in range(count)])
    return np.cumsum(signs / np.arange(1, count + 1))


def geometric_omega(count=7, labels=None):
    """Two components converging geometrically to (2, 3)."""
    terms = [np.array([2.0 - 0.5 ** n, 3.0 + 0.3 * (-0.6) ** n]) for n in range(count)]
    labels = labels if labels is not None else list(range(2, count + 2))
    return OmegaSeries(anchor_time=0.1, terms=terms, labels=labels)


def constant_omega(value, count=7):
    return OmegaSeries(anchor_time=0.1, terms=[np.array(value, dtype=float)] * count,
                       labels=list(range(2, count + 2)))
