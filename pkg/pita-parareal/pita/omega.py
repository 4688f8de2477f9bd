"""
Single-solver study: explicit Euler trajectories at subdivided steps (the
Psi series), the per-instant Omega series assembled from them, and their
error against the exact solution.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional

import numpy as np

from .accel import vector_accelerate
from .exceptions import ConfigError, DimensionMismatchError, StepAlignmentError
from .model import Trajectory, as_state
from .pool import parallel_map
from .propagators import PropagatorKind, sampled_steps, step_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubdivisionSet:
    """Reference step ``h0`` and the integer factors delta_i with h_i = h0/delta_i."""
    h0: float
    deltas: tuple

    def __post_init__(self):
        if not self.h0 > 0:
            raise ConfigError("h0 must be positive, got {}".format(self.h0))
        deltas = tuple(self.deltas)
        if not deltas:
            raise ConfigError("study.deltas: at least one subdivision is required")
        for delta in deltas:
            if int(delta) != delta or delta < 1:
                raise StepAlignmentError(
                    "study.deltas: subdivisions must be positive integers, got {}".format(delta))
        if deltas[0] != 1:
            raise ConfigError("study.deltas: the first subdivision must be 1, got {}".format(deltas[0]))
        if any(b <= a for a, b in zip(deltas, deltas[1:])):
            raise ConfigError("study.deltas: subdivisions must be strictly increasing")
        object.__setattr__(self, 'deltas', tuple(int(d) for d in deltas))

    def step(self, delta):
        return self.h0 / delta


@dataclass(frozen=True)
class OmegaSeries:
    """Successive approximations of the state at ``anchor_time``, labelled by delta or iteration."""
    anchor_time: float
    terms: List[np.ndarray] = field(repr=False)
    labels: List[float] = field(default_factory=list)

    def __post_init__(self):
        terms = [as_state(term, 'omega') for term in self.terms]
        labels = [float(label) for label in self.labels]
        if not terms:
            raise ConfigError("an omega series needs at least one term")
        if len(labels) != len(terms):
            raise DimensionMismatchError(
                'labels', "{} labels for {} terms".format(len(labels), len(terms)))
        if any(term.shape != terms[0].shape for term in terms):
            raise DimensionMismatchError('omega', "terms differ in dimension")
        if any(b <= a for a, b in zip(labels, labels[1:])):
            raise ConfigError("omega labels must be strictly increasing")
        object.__setattr__(self, 'terms', terms)
        object.__setattr__(self, 'labels', labels)

    def __len__(self):
        return len(self.terms)

    @property
    def dim(self):
        return self.terms[0].shape[0]

    @property
    def last(self):
        return self.terms[-1]

    def tail(self, min_label):
        """Terms whose label is at least ``min_label``."""
        keep = [i for i, label in enumerate(self.labels) if label >= min_label]
        if not keep:
            raise ConfigError("no omega term with label >= {}".format(min_label))
        return OmegaSeries(self.anchor_time,
                           [self.terms[i] for i in keep],
                           [self.labels[i] for i in keep])

    def stacked(self):
        return np.vstack(self.terms)


def build_psi(sys, h0, delta, Tf, t0=0.0):
    """
    Explicit Euler at step h0/delta over [t0, Tf], keeping only the coarse
    instants t0 + k0*h0 (every delta-th state).
    """
    if int(delta) != delta or delta < 1:
        raise StepAlignmentError("delta must be a positive integer, got {}".format(delta))
    delta = int(delta)
    coarse = step_count(t0, Tf, h0)
    states = [np.array(sys.y0, dtype=np.float64)]
    states.extend(sampled_steps(PropagatorKind.EXPLICIT_EULER, sys, sys.y0,
                                h0 / delta, coarse * delta, stride=delta))
    times = t0 + h0 * np.arange(coarse + 1, dtype=np.float64)
    times[-1] = Tf
    logger.debug("psi delta=%d: %d fine steps, %d samples", delta, coarse * delta, coarse + 1)
    return Trajectory(times, np.vstack(states))


def build_psi_family(sys, sub, Tf, executor=None, t0=0.0):
    """Every Psi^i of ``sub``, keyed by delta."""
    trajectories = parallel_map(partial(build_psi, sys, sub.h0, Tf=Tf, t0=t0), sub.deltas, executor)
    return dict(zip(sub.deltas, trajectories))


def build_omega_series(sys, sub, k0, Tf, family: Optional[Dict[int, Trajectory]] = None, t0=0.0):
    """
    The value at t = k0*h0 from each Psi^i, in delta order. A precomputed
    ``family`` (from :func:`build_psi_family`) avoids re-running the solver.
    """
    coarse = step_count(t0, Tf, sub.h0)
    if int(k0) != k0 or not 1 <= k0 <= coarse:
        raise ConfigError("k0 must lie in [1, {}], got {}".format(coarse, k0))
    k0 = int(k0)
    if family is None:
        family = build_psi_family(sys, sub, Tf, t0=t0)
    terms = [family[delta].states[k0] for delta in sub.deltas]
    anchor = float(family[sub.deltas[0]].times[k0])
    return OmegaSeries(anchor_time=anchor, terms=terms, labels=list(sub.deltas))


def omega_error_curve(series, exact):
    """Euclidean error of every term against ``exact``."""
    exact = np.asarray(exact, dtype=np.float64)
    if exact.shape != (series.dim,):
        raise DimensionMismatchError(
            'exact', "expected {} entries, got {}".format(series.dim, exact.shape))
    return np.linalg.norm(series.stacked() - exact, axis=1)


def accelerate_omega(series, spec):
    return vector_accelerate(spec, series.terms)
