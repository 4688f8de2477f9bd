"""
Sequence acceleration: the Shanks transform, Wynn's epsilon algorithm and
its coupling with an auxiliary alternating series.

Vector sequences are accelerated one component at a time.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from .constants import DEFAULT_ACCEL_K, DEFAULT_ACCEL_N, DENOM_GUARD
from .exceptions import (
    ConfigError,
    DegenerateDenominatorError,
    DimensionMismatchError,
    InsufficientTermsError,
    NonFiniteEntryError,
    OddOrderError,
)

logger = logging.getLogger(__name__)

AUX_FORMS = ('literal', 'alternate')


@dataclass(frozen=True)
class AuxSeriesParams:
    """
    S_b(n) = S_b0 + (-1)^n * sum_{j=1..n} 1/(n+1)^q

    ``form='literal'`` keeps the summand independent of j, so the sum is
    n/(n+1)^q. ``form='alternate'`` sums 1/(j+1)^q instead.
    """
    S_b0: float = 0.0
    q: float = 1.0
    form: str = 'literal'

    def __post_init__(self):
        if not np.isfinite(self.S_b0):
            raise NonFiniteEntryError('accel.S_b0')
        if not self.q > 0:
            raise ConfigError("accel.q: must be positive, got {}".format(self.q))
        if self.form not in AUX_FORMS:
            raise ConfigError("accel.aux_form: expected one of {}, got {!r}".format(AUX_FORMS, self.form))


@dataclass(frozen=True)
class AccelSpec:
    k: int = DEFAULT_ACCEL_K
    n: int = DEFAULT_ACCEL_N
    rho: float = 1.0
    aux: Optional[AuxSeriesParams] = None
    denom_guard: float = DENOM_GUARD
    # bounds on the spacing of the labels of an accelerated series
    delta1: Optional[float] = None
    delta2: Optional[float] = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0 or self.k % 2:
            raise OddOrderError(self.k)
        if int(self.n) != self.n or self.n < 0:
            raise ConfigError("accel.n: must be a non-negative integer, got {}".format(self.n))
        if not self.rho > 0:
            raise ConfigError("accel.rho: must be positive, got {}".format(self.rho))
        if not self.denom_guard >= 0:
            raise ConfigError("accel.denom_guard: must be non-negative")
        if (self.delta1 is None) != (self.delta2 is None):
            raise ConfigError("delta1 and delta2 must be given together")
        if self.delta1 is not None and not 0 <= self.delta1 < self.delta2:
            raise ConfigError(
                "delta-distance bounds need 0 <= delta1 < delta2, got ({}, {})".format(
                    self.delta1, self.delta2))
        object.__setattr__(self, 'k', int(self.k))
        object.__setattr__(self, 'n', int(self.n))

    @property
    def terms_needed(self):
        return terms_needed(self.k, self.n)

    def with_q(self, q):
        aux = self.aux if self.aux is not None else AuxSeriesParams(S_b0=0.0, q=q)
        return replace(self, aux=replace(aux, q=q))


@dataclass
class EpsilonTable:
    """
    Column c holds eps_c^(0..len-1-c); column 0 is the input sequence.
    ``flags[c][n]`` marks entries produced by the small-denominator guard.
    """
    columns: List[np.ndarray]
    flags: List[np.ndarray]

    def entry(self, k, n):
        if k % 2:
            raise OddOrderError(k)
        return float(self.columns[k][n])

    @property
    def flagged(self):
        return any(flag.any() for flag in self.flags)


def _as_sequence(seq):
    terms = np.asarray(seq, dtype=np.float64)
    if terms.ndim != 1 or terms.size < 1:
        raise ConfigError("a sequence needs at least one term")
    if not np.all(np.isfinite(terms)):
        raise NonFiniteEntryError('sequence')
    return terms


def shanks(s0, s1, s2, guard=DENOM_GUARD):
    """(s0 s2 - s1^2) / (s0 + s2 - 2 s1)"""
    denominator = s0 + s2 - 2.0 * s1
    if abs(denominator) <= guard * max(1.0, abs(s0), abs(s1), abs(s2)):
        raise DegenerateDenominatorError(
            "Shanks denominator vanishes for ({}, {}, {})".format(s0, s1, s2))
    return (s0 * s2 - s1 * s1) / denominator


def epsilon_table(seq, guard=DENOM_GUARD):
    """
    Wynn's recursion eps_{k+1}^(n) = eps_{k-1}^(n+1) + 1/(eps_k^(n+1) - eps_k^(n))
    with eps_{-1} = 0 and eps_0 = S.

    A difference with |d| <= guard * (1 + |eps_k^(n)|) marks a converged
    column and the entry is flagged. A guarded even entry takes
    eps_{k-1}^(n+1); a guarded odd entry is stored as +inf so that the even
    entry built on it falls back to eps_{k-1}^(n+1) as well.
    """
    terms = _as_sequence(seq)
    size = terms.shape[0]
    previous = np.zeros(size + 1)
    current = terms.copy()
    columns = [current]
    flags = [np.zeros(size, dtype=bool)]
    for c in range(1, size):
        length = size - c
        column = np.empty(length)
        flag = np.zeros(length, dtype=bool)
        for n in range(length):
            # inf - inf on a guarded odd column yields nan, which is flagged below
            with np.errstate(invalid='ignore'):
                diff = current[n + 1] - current[n]
            if not np.isfinite(diff) or abs(diff) <= guard * (1.0 + abs(current[n])):
                column[n] = np.inf if c % 2 else previous[n + 1]
                flag[n] = True
            else:
                column[n] = previous[n + 1] + 1.0 / diff
        if flag.any():
            logger.debug("epsilon column %d: %d guarded entries", c, int(flag.sum()))
        columns.append(column)
        flags.append(flag)
        previous, current = current, column
    return EpsilonTable(columns=columns, flags=flags)


def terms_needed(k, n):
    """Terms S_n .. S_{n+k} consumed by an order-k extrapolation."""
    if int(k) != k or k < 0 or k % 2:
        raise OddOrderError(k)
    return int(n) + int(k) + 1


def s_epsilon(spec, seq):
    """eps_k^(n): the order-k extrapolant starting at index n."""
    terms = _as_sequence(seq)
    required = terms_needed(spec.k, spec.n)
    if terms.shape[0] < required:
        raise InsufficientTermsError(required, terms.shape[0])
    # eps_k^(n) only depends on S_n .. S_{n+k}
    table = epsilon_table(terms[spec.n:required], spec.denom_guard)
    return table.entry(spec.k, 0)


###########################
# auxiliary alternating series
###########################
def aux_series_term(p, n):
    if n < 0:
        raise ConfigError("aux series index must be non-negative, got {}".format(n))
    sign = -1.0 if n % 2 else 1.0
    if p.form == 'literal':
        return p.S_b0 + sign * n / (n + 1.0) ** p.q
    j = np.arange(1, n + 1, dtype=np.float64)
    return p.S_b0 + sign * float(np.sum(1.0 / (j + 1.0) ** p.q))


def aux_series(p, length):
    return np.array([aux_series_term(p, n) for n in range(length)])


def accelerate_with_aux(spec, omega):
    """
    Extrapolate rho*omega + S_b, remove the extrapolated limit of S_b alone
    and undo the scaling. Without ``spec.aux`` the coupled series is zero.
    """
    terms = _as_sequence(omega)
    if spec.aux is None:
        aux = np.zeros(terms.shape[0])
    else:
        aux = aux_series(spec.aux, terms.shape[0])
    coupled = s_epsilon(spec, spec.rho * terms + aux)
    alone = s_epsilon(spec, aux)
    return (coupled - alone) / spec.rho


def vector_accelerate(spec, seq_of_vectors):
    """Componentwise extrapolation of a sequence of state vectors."""
    try:
        stacked = np.vstack([np.atleast_1d(np.asarray(v, dtype=np.float64))
                             for v in seq_of_vectors])
    except ValueError as exc:
        raise DimensionMismatchError('sequence', "vectors differ in dimension ({})".format(exc))
    required = terms_needed(spec.k, spec.n)
    if stacked.shape[0] < required:
        raise InsufficientTermsError(required, stacked.shape[0])
    accelerate = accelerate_with_aux if spec.aux is not None else s_epsilon
    return np.array([accelerate(spec, stacked[:, i]) for i in range(stacked.shape[1])])
