"""Mutual information rate of the receptor channel, three ways.

* ``mir_discrete``   -- finite-step rate at delta_t, the per-pair entropy
  difference of the input-conditioned and input-averaged chains.
* ``mir_quadrature`` -- continuous-time limit: gain * Jensen gap of x*ln(x).
* ``mir_series``     -- power-series approximation of the gap, truncated at
  a chosen order, valid on 0 < a and b <= 2.

All three return values in bits/s.  The gain factor carries the 1/ln 2
conversion, so the recorded Jensen gap stays in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import (
    DomainError,
    OrderTooHigh,
    OutOfConvergenceRegion,
    ValidationError,
)
from .receptor import (
    ReceptorSpec,
    affine_generator,
    build_rate_matrix,
    sensitive_gain,
    stationary_distribution,
    transition_matrix,
)
from .truncgauss import (
    TruncatedGaussianSpec,
    expectation,
    raw_moments,
    shifted_moment_vector,
)

LN2 = math.log(2.0)

#: Orders above the raw-moment table ceiling are refused (shared ceiling).
MAX_SERIES_ORDER = 64

#: The raw-vs-central cross-check is limited to this many terms; beyond it
#: the raw alternating sum cannot be represented accurately in float64.
CROSS_CHECK_ORDER = 20


@dataclass(frozen=True)
class MirResult:
    """An information rate in bits/s plus how it was obtained.

    ``value = gain * gap_nats`` holds exactly for the quadrature and series
    methods; the discrete method additionally carries the finite-step
    diagonal contribution, reported in ``diagnostics``.
    """

    value: float
    method: str
    gain: float
    gap_nats: float
    order: Optional[int] = None
    diagnostics: Mapping = field(default_factory=dict)

    def __post_init__(self):
        kind = self.method.split("(")[0]
        if kind in ("quadrature", "discrete"):
            floor = -1e-9
        elif kind == "series":
            if not self.order or self.order < 2:
                raise ValidationError("series results must carry their order")
            # a truncated tail can undershoot zero by up to gain/order
            floor = -(self.gain / self.order + 1e-9)
        else:
            floor = -math.inf
        if self.value < floor:
            raise ValidationError(
                f"{self.method} rate {self.value} below admissible floor {floor}"
            )
        if kind in ("quadrature", "series"):
            if abs(self.value - self.gain * self.gap_nats) > 1e-12 * max(
                abs(self.value), 1e-300
            ):
                raise ValidationError("value must equal gain * gap_nats")


def plogp(p: float) -> float:
    """p * log2(p), continuously extended by 0 at p = 0.

    Raises DomainError outside [0, 1].
    """
    if not (isinstance(p, (int, float)) and 0.0 <= p <= 1.0):
        raise DomainError(f"plogp requires 0 <= p <= 1, got {p!r}")
    if p == 0.0:
        return 0.0
    return p * math.log2(p)


def _plogp_vec(p: np.ndarray) -> np.ndarray:
    """Vectorized p*log2(p) with the 0 log 0 = 0 extension; no domain check."""
    safe = np.where(p > 0.0, p, 1.0)
    return np.where(p > 0.0, p * np.log2(safe), 0.0)


def _xlnx_vec(x: np.ndarray) -> np.ndarray:
    """x * ln(x) extended by continuity to 0 at x = 0."""
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, x * np.log(safe), 0.0)


def xlnx(x: float) -> float:
    """Scalar x * ln(x), 0 at x = 0; the convex function whose gap is the rate."""
    if x < 0.0:
        raise DomainError(f"x*ln(x) requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return x * math.log(x)


def jensen_gap(
    dist: TruncatedGaussianSpec, *, initial_nodes: int = 200
) -> float:
    """E[x ln x] - mu ln(mu) in nats, by quadrature."""
    e_xlnx = expectation(dist, _xlnx_vec, initial_nodes=initial_nodes)
    return e_xlnx - dist.mu * math.log(dist.mu)


def sensitive_pairs(spec: ReceptorSpec) -> list[tuple[int, int]]:
    """Entries of P(x) that depend on x: sensitive off-diagonals plus the
    diagonals of rows that contain one."""
    pairs = [(t.source, t.target) for t in spec.transitions if t.sensitive]
    pairs.extend((i, i) for i in spec.sensitive_rows())
    return pairs


def mir_discrete(
    spec: ReceptorSpec,
    dist: TruncatedGaussianSpec,
    delta_t: float,
    *,
    initial_nodes: int = 200,
) -> MirResult:
    """Information rate at a finite step, in bits/s.

    For every x-dependent entry (y, y') of P(x), accumulates

        pi_y * ( E[ phi(p_yy'(x)) ] - phi( E[p_yy'(x)] ) ) / delta_t

    with phi(p) = p log2 p.  x-independent entries cancel exactly.  The
    diagonal pairs contribute O(delta_t); they are included, not assumed
    away, so the vanishing in the continuous-time limit is observable.

    Raises StepTooLarge if the step is inadmissible at the worst-case
    intensity x = b.
    """
    q_worst = build_rate_matrix(spec, dist.b)
    transition_matrix(q_worst, delta_t)  # admissibility check at x = b
    if delta_t <= 0.0:
        raise ValidationError("mir_discrete needs a strictly positive delta_t")

    pi = stationary_distribution(spec, dist.mu)
    gain = sensitive_gain(spec, pi)
    base, slope = affine_generator(spec)
    eye = np.eye(spec.n_states)

    total = 0.0
    diagonal = 0.0
    for (i, j) in sensitive_pairs(spec):
        const = eye[i, j] + delta_t * base[i, j]
        lin = delta_t * slope[i, j]

        def entry(x, c=const, m=lin):
            return c + m * x

        e_phi = expectation(
            dist, lambda x: _plogp_vec(entry(x)), initial_nodes=initial_nodes
        )
        mean_entry = expectation(dist, entry, initial_nodes=initial_nodes)
        mean_entry = min(max(mean_entry, 0.0), 1.0)
        term = pi.probabilities[i] * (e_phi - plogp(mean_entry))
        total += term
        if i == j:
            diagonal += term

    value = total / delta_t
    gap = jensen_gap(dist, initial_nodes=initial_nodes)
    return MirResult(
        value=value,
        method=f"discrete({delta_t!r})",
        gain=gain,
        gap_nats=gap,
        diagnostics={
            "diagonal_bits_per_s": diagonal / delta_t,
            "off_diagonal_bits_per_s": (total - diagonal) / delta_t,
            "delta_t": delta_t,
        },
    )


def mir_quadrature(
    spec: ReceptorSpec,
    dist: TruncatedGaussianSpec,
    *,
    initial_nodes: int = 200,
) -> MirResult:
    """Continuous-time information rate: gain * (E[x ln x] - mu ln mu)."""
    pi = stationary_distribution(spec, dist.mu)
    gain = sensitive_gain(spec, pi)
    gap = jensen_gap(dist, initial_nodes=initial_nodes)
    return MirResult(
        value=gain * gap,
        method="quadrature",
        gain=gain,
        gap_nats=gap,
        diagnostics={"pi": tuple(float(p) for p in pi.probabilities)},
    )


def _series_gap_terms(moments_about_one: np.ndarray, order: int) -> list[float]:
    """Terms (-1)^k E[(x-1)^k] / (k (k-1)) for k = 2..order."""
    return [
        (-1.0) ** k * float(moments_about_one[k]) / (k * (k - 1))
        for k in range(2, order + 1)
    ]


def _raw_form_cross_check(
    dist: TruncatedGaussianSpec, moments_about_one: np.ndarray, order: int
) -> tuple[float, float, float]:
    """Compare the raw-moment form of the series against the recentred form.

    The raw form expands each E[(x-1)^k] into sum_m (-1)^m C(k,m) E[x^m]
    with the recursion moments.  The two forms are algebraically identical;
    in float64 the raw alternating sum is only conditionally accurate, so the
    comparison tolerance widens with its computable amplification factor.

    Returns (difference, tolerance, amplification).
    """
    kmax = min(order, CROSS_CHECK_ORDER)
    table = raw_moments(dist, kmax)
    raw = table.raw
    raw_terms = []
    amplification = 0.0
    for k in range(2, kmax + 1):
        inner = math.fsum(
            (-1.0) ** m * math.comb(k, m) * raw[m] for m in range(k + 1)
        )
        raw_terms.append(inner / (k * (k - 1)))
        amplification += math.fsum(
            math.comb(k, m) * abs(raw[m]) for m in range(k + 1)
        ) / (k * (k - 1))
    raw_sum = math.fsum(raw_terms)
    central_sum = math.fsum(_series_gap_terms(moments_about_one, kmax))
    # the recursion moments carry at most 1e-8 relative error in-domain
    # (enforced against quadrature elsewhere); the raw alternating sum is
    # trustworthy only to that times its amplification factor
    tol = max(1e-9, 1e-8 * amplification)
    diff = abs(raw_sum - central_sum)
    if diff > tol:
        raise ValidationError(
            f"series cross-check failed: raw-moment form and recentred form "
            f"disagree by {diff:.3e} (tolerance {tol:.3e})"
        )
    return diff, tol, amplification


def mir_series(
    spec: ReceptorSpec,
    dist: TruncatedGaussianSpec,
    order: int = 40,
    *,
    initial_nodes: int = 200,
) -> MirResult:
    """Series approximation of the continuous-time rate, truncated at ``order``.

    Expands ln(x) about 1, turning the Jensen gap into

        sum_{k=2..order} (-1)^k E[(x-1)^k] / (k (k-1))  -  mu ln(mu/e)  -  1.

    Requires 0 < a and b <= 2 so the expansion converges on the support; the
    truncation error is bounded by 1/order in nats.  E[(x-1)^k] is computed
    by quadrature (bounded integrand, no cancellation); the raw-moment form
    of the same sum is evaluated through order 20 as a cross-check.

    Raises OutOfConvergenceRegion when the support leaves (0, 2], and
    OrderTooHigh above the shared order ceiling.
    """
    if dist.a <= 0.0 or dist.b > 2.0:
        raise OutOfConvergenceRegion(
            f"series needs support within (0, 2], got [{dist.a}, {dist.b}]"
        )
    if order < 2:
        raise ValidationError(f"series order must be >= 2, got {order}")
    if order > MAX_SERIES_ORDER:
        raise OrderTooHigh(f"series order {order} exceeds ceiling {MAX_SERIES_ORDER}")

    moments = shifted_moment_vector(dist, 1.0, order, initial_nodes=initial_nodes)
    diff, tol, amplification = _raw_form_cross_check(dist, moments, order)

    series_sum = math.fsum(_series_gap_terms(moments, order))
    mu = dist.mu
    gap = series_sum - mu * (math.log(mu) - 1.0) - 1.0

    pi = stationary_distribution(spec, dist.mu)
    gain = sensitive_gain(spec, pi)
    return MirResult(
        value=gain * gap,
        method=f"series({order})",
        gain=gain,
        gap_nats=gap,
        order=order,
        diagnostics={
            "cross_check_diff": diff,
            "cross_check_tol": tol,
            "cross_check_amplification": amplification,
            "tail_bound_nats": 1.0 / order,
        },
    )
