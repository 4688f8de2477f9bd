"""
Euler propagators for LTI systems, the closed-form explicit induction, the
matrix-exponential reference solution and the explicit stability radius.
"""

import enum
import logging
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, expm, lu_factor, lu_solve

from .constants import SINGULAR_TOL, STEP_COUNT_RTOL
from .exceptions import (
    ConfigError,
    NonFiniteResultError,
    SingularMatrixError,
    StepAlignmentError,
)
from .model import Trajectory

logger = logging.getLogger(__name__)


class PropagatorKind(enum.Enum):
    EXPLICIT_EULER = 'explicit'
    IMPLICIT_EULER = 'implicit'


def step_count(t_start, t_end, h):
    """Number of steps of size ``h`` covering [t_start, t_end] exactly."""
    if not t_end > t_start:
        raise ConfigError("t_end={} must exceed t_start={}".format(t_end, t_start))
    if not h > 0:
        raise ConfigError("step must be positive, got h={}".format(h))
    ratio = (t_end - t_start) / h
    count = int(round(ratio))
    if count < 1 or abs(ratio - count) > STEP_COUNT_RTOL * max(1.0, ratio):
        raise StepAlignmentError(
            "interval [{}, {}] is not a whole number of steps h={} ({} steps)".format(
                t_start, t_end, h, ratio))
    return count


def _step_times(t_start, t_end, count):
    times = t_start + (t_end - t_start) * np.arange(count + 1, dtype=np.float64) / count
    times[-1] = t_end
    return times


def _check_finite(y, step):
    if not np.all(np.isfinite(y)):
        raise NonFiniteResultError(step)


###########################
# explicit Euler
###########################
def _amplification(sys, h):
    return np.eye(sys.dim) + h * sys.A


def explicit_euler_step(sys, y, h):
    """(I + hA) y + h B u"""
    if h < 0:
        raise ConfigError("step must be non-negative, got h={}".format(h))
    y_next = _amplification(sys, h) @ np.asarray(y, dtype=np.float64) + h * sys.forcing
    _check_finite(y_next, 1)
    return y_next


def _explicit_steps(sys, y, h, count, stride=None):
    """Yield every ``stride``-th state of ``count`` explicit steps (or the last only)."""
    M = _amplification(sys, h)
    f = h * sys.forcing
    y = np.array(y, dtype=np.float64)
    for i in range(1, count + 1):
        y = M @ y + f
        _check_finite(y, i)
        if stride is not None and i % stride == 0:
            yield y
    if stride is None:
        yield y


def explicit_euler_propagate(sys, y_start, t_start, t_end, h):
    count = step_count(t_start, t_end, h)
    states = [np.array(y_start, dtype=np.float64)]
    states.extend(_explicit_steps(sys, y_start, h, count, stride=1))
    return Trajectory(_step_times(t_start, t_end, count), np.vstack(states))


def closed_form_explicit(sys, y_start, k0, h):
    """
    (I + hA)^k0 y + sum_{j<k0} (I + hA)^j h B u, keeping only the running
    power of the amplification matrix.
    """
    if k0 < 0:
        raise ConfigError("k0 must be non-negative, got {}".format(k0))
    M = _amplification(sys, h)
    f = h * sys.forcing
    power = np.eye(sys.dim)
    total = np.zeros(sys.dim)
    for _ in range(k0):
        total += power @ f
        power = M @ power
    y = power @ np.asarray(y_start, dtype=np.float64) + total
    _check_finite(y, k0)
    return y


###########################
# implicit Euler
###########################
def _implicit_factor(sys, h):
    matrix = np.eye(sys.dim) - h * sys.A
    scale = np.linalg.norm(matrix, 1) ** sys.dim
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', LinAlgWarning)
        lu, piv = lu_factor(matrix)
    det = abs(np.prod(np.diag(lu)))
    if not det > SINGULAR_TOL * scale:
        raise SingularMatrixError(
            "I - hA is singular for h={} (|det|={:.3e})".format(h, det))
    return lu, piv


def implicit_euler_step(sys, y, h):
    """Solve (I - hA) z = y + h B u."""
    if h < 0:
        raise ConfigError("step must be non-negative, got h={}".format(h))
    factor = _implicit_factor(sys, h)
    z = lu_solve(factor, np.asarray(y, dtype=np.float64) + h * sys.forcing)
    _check_finite(z, 1)
    return z


def _implicit_steps(sys, y, h, count, stride=None):
    factor = _implicit_factor(sys, h)
    f = h * sys.forcing
    y = np.array(y, dtype=np.float64)
    for i in range(1, count + 1):
        y = lu_solve(factor, y + f)
        _check_finite(y, i)
        if stride is not None and i % stride == 0:
            yield y
    if stride is None:
        yield y


def implicit_euler_propagate(sys, y_start, t_start, t_end, h):
    count = step_count(t_start, t_end, h)
    states = [np.array(y_start, dtype=np.float64)]
    states.extend(_implicit_steps(sys, y_start, h, count, stride=1))
    return Trajectory(_step_times(t_start, t_end, count), np.vstack(states))


###########################
# dispatch
###########################
_STEPPERS = {
    PropagatorKind.EXPLICIT_EULER: _explicit_steps,
    PropagatorKind.IMPLICIT_EULER: _implicit_steps,
}


def propagate(kind, sys, y_start, t_start, t_end, h):
    if kind is PropagatorKind.EXPLICIT_EULER:
        return explicit_euler_propagate(sys, y_start, t_start, t_end, h)
    return implicit_euler_propagate(sys, y_start, t_start, t_end, h)


def advance(kind, sys, y_start, t_start, t_end, h):
    """Endpoint of ``propagate`` without storing the trajectory."""
    count = step_count(t_start, t_end, h)
    return next(_STEPPERS[kind](sys, y_start, h, count))


def sampled_steps(kind, sys, y_start, h, count, stride):
    """States after every ``stride`` steps, ``count`` steps in total."""
    return _STEPPERS[kind](sys, y_start, h, count, stride=stride)


###########################
# reference solution
###########################
def exact_solution(sys, t):
    """
    e^{At} y0 + int_0^t e^{A(t-s)} B u ds from one exponential of the
    augmented matrix [[A, Bu], [0, 0]] (no inverse of A needed).
    """
    if t < 0:
        raise ConfigError("t must be non-negative, got {}".format(t))
    d = sys.dim
    augmented = np.zeros((d + 1, d + 1))
    augmented[:d, :d] = sys.A
    augmented[:d, d] = sys.forcing
    # scipy's expm is scaling-and-squaring with a degree-13 Pade approximant
    E = expm(augmented * t)
    return E[:d, :d] @ sys.y0 + E[:d, d]


def exact_trajectory(sys, times):
    times = np.asarray(times, dtype=np.float64)
    return Trajectory(times, np.vstack([exact_solution(sys, t) for t in times]))


def stability_radius(sys, h):
    """Spectral radius of the explicit amplification matrix I + hA."""
    if h < 0:
        raise ConfigError("step must be non-negative, got h={}".format(h))
    return float(np.max(np.abs(np.linalg.eigvals(_amplification(sys, h)))))
