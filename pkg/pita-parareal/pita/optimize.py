"""
Calibration of the auxiliary-series exponent q.

A fine explicit run manufactures the reference limit of the first slice, and
simulated annealing over log10(q) minimizes the distance between the
accelerated first Omega series and that reference. The resulting q is then
carried to the other slices.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import partial
from typing import Optional

import numpy as np

from .accel import AccelSpec, vector_accelerate
from .constants import (
    DEFAULT_ANNEAL_STEPS,
    DEFAULT_COOLING,
    DEFAULT_PROPOSAL_SCALE,
    DEFAULT_Q_MAX,
    DEFAULT_Q_MIN,
)
from .exceptions import ConfigError, ConstraintViolationError, StabilityError, StepAlignmentError
from .pool import parallel_map
from .propagators import PropagatorKind, advance, sampled_steps, stability_radius, step_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnnealConfig:
    """
    ``initial_temp=None`` starts at the objective value of the initial q;
    ``q_init=None`` starts at the logarithmic midpoint of the bounds.
    """
    q_min: float = DEFAULT_Q_MIN
    q_max: float = DEFAULT_Q_MAX
    initial_temp: Optional[float] = None
    cooling: float = DEFAULT_COOLING
    steps: int = DEFAULT_ANNEAL_STEPS
    proposal_scale: float = DEFAULT_PROPOSAL_SCALE
    seed: int = 0
    q_init: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.q_min < self.q_max or not np.isfinite(self.q_max):
            raise ConfigError("anneal: need 0 < q_min < q_max, got ({}, {})".format(self.q_min, self.q_max))
        if self.initial_temp is not None and not self.initial_temp > 0:
            raise ConfigError("anneal.initial_temp must be positive, got {}".format(self.initial_temp))
        if not 0 < self.cooling < 1:
            raise ConfigError("anneal.cooling must lie in (0, 1), got {}".format(self.cooling))
        if int(self.steps) != self.steps or self.steps < 1:
            raise ConfigError("anneal.steps must be a positive integer, got {}".format(self.steps))
        if not self.proposal_scale > 0:
            raise ConfigError("anneal.proposal_scale must be positive, got {}".format(self.proposal_scale))
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer, got {}".format(self.seed))
        if self.q_init is not None and not self.q_min <= self.q_init <= self.q_max:
            raise ConfigError("anneal.q_init={} lies outside [{}, {}]".format(
                self.q_init, self.q_min, self.q_max))
        object.__setattr__(self, 'steps', int(self.steps))
        object.__setattr__(self, 'seed', int(self.seed))

    @property
    def start(self):
        if self.q_init is not None:
            return self.q_init
        return math.sqrt(self.q_min * self.q_max)


@dataclass(frozen=True)
class CalibrationResult:
    q_opt: float
    objective_at_opt: float
    reference_limit: np.ndarray
    evaluations: int
    initial_objective: float = math.nan
    accepted: int = 0


###########################
# reference limits
###########################
def _check_stable(sys, h):
    radius = stability_radius(sys, h)
    if radius >= 1:
        raise StabilityError(
            "explicit Euler amplifies with h={} (spectral radius {:.6f})".format(h, radius))


def bootstrap_reference(sys, t1, h_tiny, t0=0.0):
    """Explicit Euler endpoint at t1 with a very small step; stands for Omega^lim_1."""
    _check_stable(sys, h_tiny)
    return advance(PropagatorKind.EXPLICIT_EULER, sys, sys.y0, t0, t1, h_tiny)


def reference_limits(sys, times, h_tiny):
    """
    One explicit run at ``h_tiny`` sampled at every slice boundary; row j
    is Omega^lim_j, row 0 is y0. Slices must be of equal width.
    """
    times = np.asarray(times, dtype=np.float64)
    _check_stable(sys, h_tiny)
    per_slice = step_count(times[0], times[1], h_tiny)
    total = step_count(times[0], times[-1], h_tiny)
    if total != per_slice * (times.shape[0] - 1):
        raise StepAlignmentError(
            "{} steps do not split into {} slices of {}".format(total, times.shape[0] - 1, per_slice))
    rows = [np.array(sys.y0, dtype=np.float64)]
    rows.extend(sampled_steps(PropagatorKind.EXPLICIT_EULER, sys, sys.y0, h_tiny, total, per_slice))
    logger.info("reference limits: %d explicit steps at h=%g", total, h_tiny)
    return np.vstack(rows)


###########################
# objective
###########################
def check_delta_distance(series, delta1, delta2):
    """Every label spacing must lie strictly inside (delta1, delta2)."""
    if delta1 is None or delta2 is None:
        return
    labels = series.labels
    for a, b in zip(labels, labels[1:]):
        if not delta1 < abs(b - a) < delta2:
            raise ConstraintViolationError(
                "labels {} and {} are {} apart, outside ({}, {})".format(a, b, abs(b - a), delta1, delta2))


def _objective_value(q, terms, reference, spec):
    accelerated = vector_accelerate(spec.with_q(q), terms)
    return float(np.linalg.norm(accelerated - reference))


def _prepare(omega1, reference, rho, base_spec):
    spec = replace(base_spec or AccelSpec(), rho=rho)
    check_delta_distance(omega1, spec.delta1, spec.delta2)
    reference = np.asarray(reference, dtype=np.float64)
    if reference.shape != (omega1.dim,):
        raise ConfigError("reference has shape {}, expected ({},)".format(reference.shape, omega1.dim))
    return spec, reference


def objective(q, omega1, reference, rho, base_spec=None):
    """|| accelerated Omega_1 with exponent q - reference ||"""
    if not q > 0:
        raise ConfigError("q must be positive, got {}".format(q))
    spec, reference = _prepare(omega1, reference, rho, base_spec)
    return _objective_value(q, omega1.terms, reference, spec)


def scan_objective(omega1, reference, rho, qs, base_spec=None):
    """Objective at every q of ``qs``."""
    spec, reference = _prepare(omega1, reference, rho, base_spec)
    return np.array([_objective_value(q, omega1.terms, reference, spec) for q in qs])


###########################
# simulated annealing
###########################
def anneal_q(omega1, reference, rho, acfg, base_spec=None):
    """
    Metropolis chain on log10(q) with Gaussian proposals clipped to the
    bounds and temperature T_i = T0 * cooling^i. The best point evaluated
    is returned, so the result never regresses past the starting point.
    """
    spec, reference = _prepare(omega1, reference, rho, base_spec)
    lo, hi = math.log10(acfg.q_min), math.log10(acfg.q_max)
    rng = np.random.default_rng(acfg.seed)

    def to_q(x):
        return min(max(10.0 ** x, acfg.q_min), acfg.q_max)

    x, q = math.log10(acfg.start), acfg.start
    f = _objective_value(q, omega1.terms, reference, spec)
    initial = f
    best_q, best_f = q, f
    T0 = acfg.initial_temp if acfg.initial_temp is not None else f
    if not T0 > 0:
        T0 = np.finfo(float).tiny
    accepted = 0
    for i in range(acfg.steps):
        T = T0 * acfg.cooling ** i
        x_new = min(max(x + acfg.proposal_scale * rng.standard_normal(), lo), hi)
        q_new = to_q(x_new)
        f_new = _objective_value(q_new, omega1.terms, reference, spec)
        u = rng.random()
        if f_new <= f or (T > 0 and u < math.exp(-(f_new - f) / T)):
            x, f = x_new, f_new
            accepted += 1
        if f_new < best_f:
            best_q, best_f = q_new, f_new
    q_opt = best_q
    logger.debug("annealing seed=%d: %d/%d accepted, objective %.3e -> %.3e at q=%.4g",
                 acfg.seed, accepted, acfg.steps, initial, best_f, q_opt)
    return CalibrationResult(q_opt=q_opt, objective_at_opt=best_f,
                             reference_limit=reference, evaluations=acfg.steps + 1,
                             initial_objective=initial, accepted=accepted)


def _chain(omega1, reference, rho, acfg, base_spec, seed):
    return anneal_q(omega1, reference, rho, replace(acfg, seed=seed), base_spec)


def anneal_chains(omega1, reference, rho, acfg, chains=1, base_spec=None, executor=None):
    """Independent chains seeded seed, seed+1, ...; the lowest objective wins (first on ties)."""
    if int(chains) != chains or chains < 1:
        raise ConfigError("anneal.chains must be a positive integer, got {}".format(chains))
    seeds = [(acfg.seed + i) % 2 ** 64 for i in range(int(chains))]
    results = parallel_map(partial(_chain, omega1, reference, rho, acfg, base_spec), seeds, executor)
    return min(results, key=lambda r: r.objective_at_opt)


def propagate_calibration(result, spec):
    """``spec`` with q replaced by the calibrated value."""
    return spec.with_q(result.q_opt)


def periodic_refresh(interval, n_slices):
    """Slices at which q is recalibrated: 1, 1+interval, ..."""
    if int(interval) != interval or interval < 1:
        raise ConfigError("calibration.refresh_interval must be a positive integer, got {}".format(interval))
    return list(range(1, int(n_slices) + 1, int(interval)))
