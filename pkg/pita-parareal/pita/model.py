"""
Core value types: the linear time-invariant system, the time grid and
trajectories. State vectors are plain 1-D float64 numpy arrays.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import ConfigError, DimensionMismatchError, NonFiniteEntryError

logger = logging.getLogger(__name__)


def _frozen_array(values, ndim=None):
    arr = np.array(values, dtype=np.float64)
    if ndim == 1:
        arr = np.atleast_1d(arr)
    arr.setflags(write=False)
    return arr


def as_state(values, field_name='state'):
    """Return ``values`` as a read-only state vector, rejecting NaN/Inf."""
    state = _frozen_array(values, ndim=1)
    if state.ndim != 1 or state.size < 1:
        raise DimensionMismatchError(
            field_name, "expected a non-empty vector, got shape {}".format(state.shape))
    if not np.all(np.isfinite(state)):
        raise NonFiniteEntryError(field_name)
    return state


@dataclass(frozen=True)
class LTISystem:
    """
    dy/dt = A y + B u with constant A, B and constant input u, y(0) = y0.

    A 1-D ``B`` is read as a single column and a scalar ``u`` as a one-element
    input. Shapes are checked by :func:`validate_system`.
    """
    A: np.ndarray
    B: np.ndarray
    u: np.ndarray
    y0: np.ndarray

    def __post_init__(self):
        B = np.array(self.B, dtype=np.float64)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        object.__setattr__(self, 'A', _frozen_array(self.A))
        object.__setattr__(self, 'B', _frozen_array(B))
        object.__setattr__(self, 'u', _frozen_array(self.u, ndim=1))
        object.__setattr__(self, 'y0', _frozen_array(self.y0, ndim=1))

    @property
    def dim(self):
        return self.y0.shape[0]

    @cached_property
    def forcing(self):
        """The constant term B u."""
        forcing = self.B @ self.u
        forcing.setflags(write=False)
        return forcing

    def with_initial_state(self, y):
        return LTISystem(self.A, self.B, self.u, as_state(y, 'y0'))

    def __eq__(self, other):
        if not isinstance(other, LTISystem):
            return NotImplemented
        return all(np.array_equal(getattr(self, name), getattr(other, name))
                   for name in ('A', 'B', 'u', 'y0'))


def validate_system(sys):
    """Check shapes and finiteness; return the system unchanged."""
    A, B, u, y0 = sys.A, sys.B, sys.u, sys.y0
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionMismatchError('A', "expected a square matrix, got shape {}".format(A.shape))
    d = A.shape[0]
    if B.ndim != 2 or B.shape[0] != d:
        raise DimensionMismatchError('B', "expected {} rows, got shape {}".format(d, B.shape))
    if u.ndim != 1 or u.shape[0] != B.shape[1]:
        raise DimensionMismatchError(
            'u', "expected {} entries (columns of B), got {}".format(B.shape[1], u.shape))
    if y0.ndim != 1 or y0.shape[0] != d:
        raise DimensionMismatchError('y0', "expected {} entries, got {}".format(d, y0.shape))
    for name, value in (('A', A), ('B', B), ('u', u), ('y0', y0)):
        if not np.all(np.isfinite(value)):
            raise NonFiniteEntryError(name)
    return sys


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    Tf: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.Tf)):
            raise ConfigError("grid: t0 and Tf must be finite")
        if not self.Tf > self.t0:
            raise ConfigError("grid: Tf={} must exceed t0={}".format(self.Tf, self.t0))
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError("grid: N must be a positive integer, got {}".format(self.N))
        object.__setattr__(self, 'N', int(self.N))

    @property
    def h_g(self):
        """Slice width."""
        return (self.Tf - self.t0) / self.N


def slice_boundaries(grid):
    """N+1 equally spaced boundaries; the last one is Tf exactly."""
    times = grid.t0 + np.arange(grid.N + 1, dtype=np.float64) * grid.h_g
    times[-1] = grid.Tf
    return times


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray = field(repr=False)

    def __post_init__(self):
        times = _frozen_array(self.times, ndim=1)
        states = np.array(self.states, dtype=np.float64)
        if states.ndim == 1:
            states = states.reshape(len(times), -1)
        states.setflags(write=False)
        if states.shape[0] != times.shape[0]:
            raise DimensionMismatchError(
                'states', "{} states for {} times".format(states.shape[0], times.shape[0]))
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ConfigError("trajectory times must be strictly increasing")
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'states', states)

    def __len__(self):
        return self.times.shape[0]

    @property
    def endpoint(self):
        return self.states[-1]

    def sample(self, stride):
        """Every ``stride``-th point, starting with the first."""
        return Trajectory(self.times[::stride], self.states[::stride])
