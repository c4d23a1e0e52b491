"""Problem instances for joint survival probabilities of cumulated multinomial counts.

The event of interest is ``P(X_1 + ... + X_i >= kappa_i for all i <= d)`` where
``X ~ Multinomial(n, p)`` over d+1 cells, ``k`` holds the per-cell thresholds
and ``kappa`` their running sums.  This module validates inputs, derives the
integer gap vectors ``j``/``J`` and the relative offsets ``eps``/``eps_tilde``
used by the integral routes, and describes the nested integration region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProbabilityWeights",
    "Thresholds",
    "SurvivalInstance",
    "make_weights",
    "make_thresholds",
    "build_instance",
    "reduce_thresholds",
    "region_contains",
    "nested_upper_limit",
    "WEIGHT_MARGIN",
]

# Weights must stay at least this far from the boundary of the simplex.
WEIGHT_MARGIN = 1e-12


def _frozen(a, dtype=float):
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ProbabilityWeights:
    """Cell weights ``p_1..p_d``, the implied last cell and the running sums.

    Attributes
    ----------
    p : ndarray, shape (d,)
        Strictly positive weights of the first d cells.
    p_last : float
        Weight ``1 - sum(p)`` of the implicit cell d+1, strictly positive.
    prefix : ndarray, shape (d,)
        ``prefix[i-1] = p_1 + ... + p_i``; strictly increasing, ``< 1``.
    p_full : ndarray, shape (d+1,)
        All cell weights including the implicit last one.
    """

    p: np.ndarray
    p_last: float
    prefix: np.ndarray
    p_full: np.ndarray

    @property
    def d(self) -> int:
        return self.p.shape[0]


def make_weights(p) -> ProbabilityWeights:
    """Validate a weight vector and derive prefix sums and the implicit cell.

    Raises
    ------
    ValueError
        If any ``p_i`` or the implied last weight sits within ``WEIGHT_MARGIN``
        of zero, or the vector is empty / not one-dimensional.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("p must be a non-empty 1-d vector of probabilities")
    if not np.all(np.isfinite(p)):
        raise ValueError("p must be finite")
    if np.any(p < WEIGHT_MARGIN):
        raise ValueError(f"all weights must be >= {WEIGHT_MARGIN}; got min {p.min()}")
    p_last = 1.0 - float(p.sum())
    if p_last < WEIGHT_MARGIN:
        raise ValueError(
            f"weights must leave at least {WEIGHT_MARGIN} for the last cell; "
            f"sum(p) = {p.sum()}"
        )
    prefix = np.cumsum(p)
    return ProbabilityWeights(
        p=_frozen(p),
        p_last=p_last,
        prefix=_frozen(prefix),
        p_full=_frozen(np.append(p, p_last)),
    )


@dataclass(frozen=True, eq=False)
class Thresholds:
    """Per-cell thresholds ``k`` and their running sums ``kappa``."""

    k: np.ndarray       # shape (d,), nonnegative integers
    kappa: np.ndarray   # kappa[i-1] = k_1 + ... + k_i


def make_thresholds(k) -> Thresholds:
    k = np.asarray(k)
    if k.ndim != 1 or k.size == 0:
        raise ValueError("k must be a non-empty 1-d vector")
    if not np.issubdtype(k.dtype, np.integer):
        kf = np.asarray(k, dtype=float)
        if not np.all(kf == np.floor(kf)):
            raise ValueError("thresholds must be integers")
        k = kf.astype(np.int64)
    if np.any(k < 0):
        raise ValueError("thresholds must be nonnegative")
    k = k.astype(np.int64)
    return Thresholds(k=_frozen(k, np.int64), kappa=_frozen(np.cumsum(k), np.int64))


@dataclass(frozen=True, eq=False)
class SurvivalInstance:
    """A fully derived problem instance ``(n, p, k)``.

    Derived quantities follow the change of variables behind the integral
    routes: ``j_i = kappa_i - kappa_{i-1}`` for ``i <= d`` (so ``j_i = k_i``),
    ``j_{d+1} = n + 1 - kappa_d``, ``J_i = j_i - 1`` and ``N = n - d``.  The
    relative offsets ``eps_i = (J_i/N - p_i)/p_i`` and ``eps_tilde = p * eps``
    exist only when ``N >= 1``; otherwise both are ``None``.
    """

    n: int
    weights: ProbabilityWeights
    thresholds: Thresholds
    N: int
    j: np.ndarray                 # shape (d+1,), integer gaps, sum = n + 1
    J: np.ndarray                 # j - 1, sum = N
    eps: np.ndarray | None        # shape (d+1,) or None when N < 1
    eps_tilde: np.ndarray | None  # p_full * eps, bitwise

    @property
    def d(self) -> int:
        return self.weights.d

    @property
    def p(self) -> np.ndarray:
        return self.weights.p

    @property
    def k(self) -> np.ndarray:
        return self.thresholds.k

    @property
    def kappa(self) -> np.ndarray:
        return self.thresholds.kappa

    @property
    def impossible(self) -> bool:
        """True when ``kappa_d > n``: the survival event has probability 0."""
        return int(self.kappa[-1]) > self.n

    @property
    def dirichlet_applicable(self) -> bool:
        """Integral representation needs every gap ``j_i >= 1``."""
        return bool(np.all(self.j >= 1))

    @property
    def gaussian_applicable(self) -> bool:
        """Gaussian-route expansions need ``J_i >= 1`` for every cell."""
        return self.N >= 1 and bool(np.all(self.J >= 1))

    @property
    def gaussian_block_reason(self) -> str | None:
        if self.N < 1:
            return "N <= 0"
        if not np.all(self.J >= 1):
            return "J_i = 0"
        return None


def build_instance(n, p, k) -> SurvivalInstance:
    """Build and fully derive a survival-probability instance.

    Parameters
    ----------
    n : int
        Number of trials, ``>= 1``.
    p : array_like, shape (d,)
        Cell weights; must satisfy the ``make_weights`` constraints.
    k : array_like, shape (d,)
        Nonnegative integer thresholds on the cumulated counts.

    Returns
    -------
    SurvivalInstance

    Notes
    -----
    No feasibility is imposed on ``k`` beyond integrality and nonnegativity:
    ``kappa_d > n`` yields a valid instance whose survival probability is 0,
    and zero thresholds merely make the instance ineligible for the integral
    routes until :func:`reduce_thresholds` is applied.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    weights = make_weights(p)
    thresholds = make_thresholds(k)
    if weights.d != thresholds.k.shape[0]:
        raise ValueError(
            f"p and k must have the same length; got {weights.d} and {thresholds.k.shape[0]}"
        )
    d = weights.d
    kappa = thresholds.kappa
    j = np.empty(d + 1, dtype=np.int64)
    j[0] = kappa[0]
    j[1:d] = kappa[1:] - kappa[:-1]
    j[d] = n + 1 - kappa[-1]
    J = j - 1
    N = n - d

    eps = eps_tilde = None
    if N >= 1:
        p_full = weights.p_full
        eps = (J / N - p_full) / p_full
        # eps_tilde = p*eps holds bitwise by construction; it equals
        # J/N - p_full up to one rounding.
        eps_tilde = p_full * eps
        eps = _frozen(eps)
        eps_tilde = _frozen(eps_tilde)

    return SurvivalInstance(
        n=n,
        weights=weights,
        thresholds=thresholds,
        N=N,
        j=_frozen(j, np.int64),
        J=_frozen(J, np.int64),
        eps=eps,
        eps_tilde=eps_tilde,
    )


def reduce_thresholds(p, k):
    """Drop zero thresholds by merging their cells forward.

    A threshold ``k_i = 0`` makes constraint i redundant (counts are
    nonnegative), so cell i can be absorbed into cell i+1 without changing the
    survival probability; a trailing zero cell is absorbed by the implicit
    last cell.  The returned pair has all thresholds ``>= 1`` and may be empty
    (all constraints vacuous, survival probability 1).

    Returns
    -------
    (ndarray, ndarray)
        Reduced weights and thresholds, possibly of length 0.
    """
    p = np.asarray(p, dtype=float)
    k = np.asarray(k, dtype=np.int64)
    if p.shape != k.shape or p.ndim != 1:
        raise ValueError("p and k must be 1-d vectors of equal length")
    out_p: list[float] = []
    out_k: list[int] = []
    carry = 0.0
    for pi, ki in zip(p, k):
        if ki == 0:
            carry += pi
        else:
            out_p.append(pi + carry)
            out_k.append(int(ki))
            carry = 0.0
    return np.asarray(out_p, dtype=float), np.asarray(out_k, dtype=np.int64)


def region_contains(weights: ProbabilityWeights, s) -> bool:
    """Membership test for the nested integration region.

    The region consists of the points ``s >= 0`` whose prefix sums satisfy
    ``s_1 + ... + s_i <= p_1 + ... + p_i`` for every ``i <= d``; boundary
    points count as inside.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (weights.d,):
        raise ValueError(f"s must have shape ({weights.d},), got {s.shape}")
    if np.any(s < 0.0):
        return False
    return bool(np.all(np.cumsum(s) <= weights.prefix))


def nested_upper_limit(weights: ProbabilityWeights, i: int, s_prefix) -> float:
    """Upper integration limit of axis ``i`` given the coordinates before it.

    For the iterated integral over the nested region, axis ``i`` (1-based)
    runs over ``[0, U_i]`` with ``U_i = (p_1 + ... + p_i) - (s_1 + ... +
    s_{i-1})``.

    Raises
    ------
    ValueError
        If ``s_prefix`` already violates one of the earlier limits.
    """
    d = weights.d
    if not 1 <= i <= d:
        raise ValueError(f"axis index must be in [1, {d}], got {i}")
    s_prefix = np.asarray(s_prefix, dtype=float)
    if s_prefix.shape != (i - 1,):
        raise ValueError(f"s_prefix must have shape ({i - 1},), got {s_prefix.shape}")
    running = 0.0
    for t in range(i - 1):
        if s_prefix[t] < 0.0 or running + s_prefix[t] > weights.prefix[t]:
            raise ValueError(f"s_prefix violates the limit on axis {t + 1}")
        running += s_prefix[t]
    return float(weights.prefix[i - 1] - running)
