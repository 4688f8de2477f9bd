"""
Parareal on a slice grid: the classic predictor-corrector iteration and the
semi-explicit variant whose fine step is refined at every iteration.

Iteration 0 is the sequential implicit coarse sweep that seeds the boundary
values. Correction pass k (k = 1..K) turns U^{k-1} into U^k. The semi-explicit
pass 1 subtracts the implicit coarse predictor; later passes subtract the
explicit one. From pass 2 on, the boundary values feed one Omega series per
slice boundary.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Union

import numpy as np

from .accel import terms_needed, vector_accelerate
from .exceptions import (
    ConfigError,
    InsufficientTermsError,
    NumericalError,
    PropagationError,
    ScheduleViolationError,
)
from .model import TimeGrid, slice_boundaries
from .omega import OmegaSeries
from .pool import parallel_map
from .propagators import PropagatorKind, advance, step_count

logger = logging.getLogger(__name__)


###########################
# configuration
###########################
@dataclass(frozen=True)
class DeltaSchedule:
    """
    delta_k = delta_base + (k-1) * delta_step for pass k >= 1.

    With ``delta1``/``delta2`` set, consecutive factors must keep
    delta1 < |delta_k - delta_{k+1}| < delta2.
    """
    delta_base: float
    delta_step: float = 0.0
    delta1: Optional[float] = None
    delta2: Optional[float] = None

    def __post_init__(self):
        if not self.delta_base > 0:
            raise ConfigError("schedule.delta_base must be positive, got {}".format(self.delta_base))
        if (self.delta1 is None) != (self.delta2 is None):
            raise ConfigError("schedule.delta1 and schedule.delta2 must be given together")
        if self.bounded:
            if not 0 <= self.delta1 < self.delta2:
                raise ConfigError(
                    "schedule: need 0 <= delta1 < delta2, got ({}, {})".format(self.delta1, self.delta2))
            if not self.delta1 < abs(self.delta_step) < self.delta2:
                raise ScheduleViolationError(
                    "schedule.delta_step={} lies outside ({}, {})".format(
                        self.delta_step, self.delta1, self.delta2))

    @classmethod
    def constant(cls, delta):
        return cls(delta_base=delta, delta_step=0.0)

    @property
    def bounded(self):
        return self.delta1 is not None

    def delta(self, k):
        if k < 1:
            raise ConfigError("the schedule starts at pass k=1, got k={}".format(k))
        return self.delta_base + (k - 1) * self.delta_step

    def fine_steps(self, k, coarse_steps):
        """Fine steps per slice: delta_k * coarse_steps, rounded."""
        return int(round(self.delta(k) * coarse_steps))

    def realized_delta(self, k, coarse_steps):
        return self.fine_steps(k, coarse_steps) / coarse_steps

    def check(self, iterations, coarse_steps):
        """Validate the factors actually used by passes 1..iterations."""
        realized = []
        for k in range(1, iterations + 1):
            if self.fine_steps(k, coarse_steps) < 1:
                raise ScheduleViolationError(
                    "pass k={} has delta={} and no fine step".format(k, self.delta(k)))
            realized.append(self.realized_delta(k, coarse_steps))
        if self.bounded:
            for k, (a, b) in enumerate(zip(realized, realized[1:]), start=1):
                if not self.delta1 < abs(b - a) < self.delta2:
                    raise ScheduleViolationError(
                        "realized |delta_{} - delta_{}| = {} lies outside ({}, {})".format(
                            k, k + 1, abs(b - a), self.delta1, self.delta2))
        return realized


@dataclass(frozen=True)
class ClassicMode:
    fine_step: float
    coarse_kind: PropagatorKind = PropagatorKind.IMPLICIT_EULER
    fine_kind: PropagatorKind = PropagatorKind.EXPLICIT_EULER

    def __post_init__(self):
        if not self.fine_step > 0:
            raise ConfigError("parareal.fine_step must be positive, got {}".format(self.fine_step))


@dataclass(frozen=True)
class SemiExplicitMode:
    pass


@dataclass(frozen=True)
class ParerealConfig:
    grid: TimeGrid
    iterations: int
    schedule: Optional[DeltaSchedule] = None
    mode: Union[ClassicMode, SemiExplicitMode] = SemiExplicitMode()
    coarse_steps: int = 1

    def __post_init__(self):
        if int(self.iterations) != self.iterations or self.iterations < 2:
            raise ConfigError(
                "parareal.iterations must be an integer >= 2, got {}".format(self.iterations))
        if int(self.coarse_steps) != self.coarse_steps or self.coarse_steps < 1:
            raise ConfigError(
                "parareal.coarse_steps must be a positive integer, got {}".format(self.coarse_steps))
        object.__setattr__(self, 'iterations', int(self.iterations))
        object.__setattr__(self, 'coarse_steps', int(self.coarse_steps))
        if isinstance(self.mode, ClassicMode):
            if self.mode.fine_step > self.h_g:
                raise ConfigError("parareal.fine_step={} exceeds the coarse step {}".format(
                    self.mode.fine_step, self.h_g))
            step_count(0.0, self.grid.h_g, self.mode.fine_step)
        elif self.schedule is None:
            raise ConfigError("the semi-explicit mode needs a delta schedule")
        else:
            self.schedule.check(self.iterations, self.coarse_steps)

    @property
    def h_g(self):
        """Coarse step."""
        return self.grid.h_g / self.coarse_steps


@dataclass
class ParerealResult:
    """``iterates[k]`` holds U_0^k .. U_N^k as rows, k = 0..K."""
    times: np.ndarray
    iterates: List[np.ndarray] = field(default_factory=list, repr=False)
    omega_per_slice: List[OmegaSeries] = field(default_factory=list, repr=False)
    final_solution: Optional[List[np.ndarray]] = field(default=None, repr=False)

    @property
    def n_slices(self):
        return self.times.shape[0] - 1

    @property
    def last(self):
        return self.iterates[-1]


###########################
# operators
###########################
def coarse_G(kind, sys, t_j, t_j1, U, h_g):
    return advance(kind, sys, U, t_j, t_j1, h_g)


def fine_F(sys, t_j, t_j1, U, h_fine, kind=PropagatorKind.EXPLICIT_EULER):
    return advance(kind, sys, U, t_j, t_j1, h_fine)


def _slice_steps(times, coarse_steps):
    return [(times[j + 1] - times[j]) / coarse_steps for j in range(times.shape[0] - 1)]


def _coarse_sweep(kind, sys, times, coarse_steps, iteration):
    """Sequential coarse solution from y0; row j holds the value at t_j."""
    U = np.empty((times.shape[0], sys.dim))
    U[0] = sys.y0
    for j, h in enumerate(_slice_steps(times, coarse_steps)):
        try:
            U[j + 1] = coarse_G(kind, sys, times[j], times[j + 1], U[j], h)
        except NumericalError as exc:
            raise PropagationError(iteration, j, exc) from exc
    return U


def _fine_slice(sys, times, U_prev, fine_steps, kind, iteration, j):
    h = (times[j + 1] - times[j]) / fine_steps
    try:
        return fine_F(sys, times[j], times[j + 1], U_prev[j], h, kind)
    except NumericalError as exc:
        raise PropagationError(iteration, j, exc) from exc


def _correction_pass(sys, times, U_prev, fine, coarse_kind, subtracted, coarse_steps, iteration):
    """
    U^k_{j+1} = G(U^k_j) + F(U^{k-1}_j) - subtracted[j], with the fine values
    already computed from U^{k-1}.
    """
    U = np.empty_like(U_prev)
    U[0] = sys.y0
    for j, h in enumerate(_slice_steps(times, coarse_steps)):
        try:
            predicted = coarse_G(coarse_kind, sys, times[j], times[j + 1], U[j], h)
        except NumericalError as exc:
            raise PropagationError(iteration, j, exc) from exc
        U[j + 1] = predicted + fine[j] - subtracted[j]
    logger.debug("pass k=%d: max correction %.3e", iteration,
                 float(np.max(np.linalg.norm(U - U_prev, axis=1))))
    return U


def _coarse_values(kind, sys, times, U, coarse_steps, iteration):
    """G applied to every U_j, j = 0..N-1."""
    values = []
    for j, h in enumerate(_slice_steps(times, coarse_steps)):
        try:
            values.append(coarse_G(kind, sys, times[j], times[j + 1], U[j], h))
        except NumericalError as exc:
            raise PropagationError(iteration, j, exc) from exc
    return values


def _fine_values(sys, times, U_prev, fine_steps, kind, iteration, executor):
    task = partial(_fine_slice, sys, times, U_prev, fine_steps, kind, iteration)
    return parallel_map(task, range(times.shape[0] - 1), executor)


def _collect_omega(times, iterates, labels):
    """Omega_j from U_j^2 .. U_j^K, one series per boundary j = 1..N."""
    series = []
    for j in range(1, times.shape[0]):
        series.append(OmegaSeries(anchor_time=float(times[j]),
                                  terms=[U[j] for U in iterates[2:]],
                                  labels=labels))
    return series


###########################
# drivers
###########################
def classic_parareal(sys, cfg, executor=None):
    if not isinstance(cfg.mode, ClassicMode):
        raise ConfigError("classic_parareal needs a classic configuration")
    mode = cfg.mode
    times = slice_boundaries(cfg.grid)
    fine_steps = step_count(0.0, cfg.grid.h_g, mode.fine_step)

    U = _coarse_sweep(PropagatorKind.IMPLICIT_EULER, sys, times, cfg.coarse_steps, 0)
    result = ParerealResult(times=times, iterates=[U])
    for k in range(1, cfg.iterations + 1):
        fine = _fine_values(sys, times, U, fine_steps, mode.fine_kind, k, executor)
        subtracted = _coarse_values(mode.coarse_kind, sys, times, U, cfg.coarse_steps, k)
        U = _correction_pass(sys, times, U, fine, mode.coarse_kind, subtracted, cfg.coarse_steps, k)
        result.iterates.append(U)
    result.omega_per_slice = _collect_omega(times, result.iterates,
                                            list(range(2, cfg.iterations + 1)))
    logger.info("classic parareal: %d slices, %d passes", result.n_slices, cfg.iterations)
    return result


def semi_explicit_parareal(sys, cfg, executor=None):
    if not isinstance(cfg.mode, SemiExplicitMode):
        raise ConfigError("semi_explicit_parareal needs a semi-explicit configuration")
    schedule = cfg.schedule
    realized = schedule.check(cfg.iterations, cfg.coarse_steps)
    times = slice_boundaries(cfg.grid)
    explicit, implicit = PropagatorKind.EXPLICIT_EULER, PropagatorKind.IMPLICIT_EULER

    U = _coarse_sweep(implicit, sys, times, cfg.coarse_steps, 0)
    result = ParerealResult(times=times, iterates=[U])
    # G_i(U^0_j) is the seed sweep itself
    subtracted = [U[j + 1] for j in range(result.n_slices)]
    for k in range(1, cfg.iterations + 1):
        fine_steps = schedule.fine_steps(k, cfg.coarse_steps)
        if k > 1:
            subtracted = _coarse_values(explicit, sys, times, U, cfg.coarse_steps, k)
        fine = _fine_values(sys, times, U, fine_steps, explicit, k, executor)
        U = _correction_pass(sys, times, U, fine, explicit, subtracted, cfg.coarse_steps, k)
        result.iterates.append(U)
    labels = realized[1:]
    if any(b <= a for a, b in zip(labels, labels[1:])):
        # a constant or decreasing schedule is labelled by pass instead
        labels = list(range(2, cfg.iterations + 1))
    result.omega_per_slice = _collect_omega(times, result.iterates, labels)
    logger.info("semi-explicit parareal: %d slices, %d passes, delta %g..%g",
                result.n_slices, cfg.iterations, realized[0], realized[-1])
    return result


def run_parareal(sys, cfg, executor=None):
    if isinstance(cfg.mode, ClassicMode):
        return classic_parareal(sys, cfg, executor)
    return semi_explicit_parareal(sys, cfg, executor)


###########################
# final acceleration
###########################
def extrapolate_slice(series, spec, slice_index=None):
    required = terms_needed(spec.k, spec.n)
    if len(series) < required:
        raise InsufficientTermsError(required, len(series), slice_index)
    return vector_accelerate(spec, series.terms)


def extrapolated_solution(result, spec, specs=None):
    """
    Accelerate every Omega_j. ``specs`` optionally gives one spec per slice
    (periodic recalibration); otherwise ``spec`` serves them all.
    """
    if specs is not None and len(specs) != len(result.omega_per_slice):
        raise ConfigError("{} specs for {} slices".format(len(specs), len(result.omega_per_slice)))
    specs = specs or [spec] * len(result.omega_per_slice)
    for j, (series, slice_spec) in enumerate(zip(result.omega_per_slice, specs), start=1):
        required = terms_needed(slice_spec.k, slice_spec.n)
        if len(series) < required:
            raise InsufficientTermsError(required, len(series), j)
    result.final_solution = [
        extrapolate_slice(series, slice_spec, j)
        for j, (series, slice_spec) in enumerate(zip(result.omega_per_slice, specs), start=1)]
    return result.final_solution
