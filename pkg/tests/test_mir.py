"""Information-rate computation tests.

FROZEN values were produced by scipy.integrate.quad oracles at 1e-14
tolerance against the closed-form gain; the quadrature method is also
cross-checked against an in-test adaptive-quadrature oracle.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from transduction_mir import (
    DomainError,
    OrderTooHigh,
    OutOfConvergenceRegion,
    StepTooLarge,
    TruncatedGaussianSpec,
    ValidationError,
    chr2_skeleton,
    jensen_gap,
    mir_bounds,
    mir_discrete,
    mir_quadrature,
    mir_series,
    plogp,
    sensitive_pairs,
    xlnx,
)
from conftest import random_valid_dist

# FROZEN oracle values at the canonical point (unit-rate skeleton,
# mu_bar=1, sigma_bar=0.5, [1e-5, 2]).
CANONICAL_GAP_NATS = 0.10747959570552079
CANONICAL_MIR = 0.05168672092450602


def oracle_gap(dist):
    """Adaptive-quadrature Jensen gap, independent of the package engine."""
    z = 0.5 * (
        math.erf((dist.b - dist.mu_bar) / (dist.sigma_bar * math.sqrt(2)))
        - math.erf((dist.a - dist.mu_bar) / (dist.sigma_bar * math.sqrt(2)))
    )

    def integrand(x):
        u = (x - dist.mu_bar) / dist.sigma_bar
        pdf = math.exp(-0.5 * u * u) / (dist.sigma_bar * math.sqrt(2 * math.pi)) / z
        return x * math.log(x) * pdf

    val, _ = integrate.quad(integrand, dist.a, dist.b, epsabs=1e-14, epsrel=1e-13, limit=300)
    return val - dist.mu * math.log(dist.mu)


class TestPlogp:
    def test_zero(self):
        assert plogp(0.0) == 0.0

    def test_one(self):
        assert plogp(1.0) == 0.0

    def test_half(self):
        assert plogp(0.5) == -0.5

    def test_domain(self):
        with pytest.raises(DomainError):
            plogp(-0.1)
        with pytest.raises(DomainError):
            plogp(1.1)

    def test_xlnx_extension(self):
        assert xlnx(0.0) == 0.0
        assert xlnx(1.0) == 0.0
        with pytest.raises(DomainError):
            xlnx(-1e-9)


class TestQuadrature:
    def test_canonical_frozen(self, unit_chr2, canonical_dist):
        result = mir_quadrature(unit_chr2, canonical_dist)
        assert result.value == pytest.approx(CANONICAL_MIR, rel=1e-9)
        assert result.gap_nats == pytest.approx(CANONICAL_GAP_NATS, rel=1e-9)
        assert result.value == result.gain * result.gap_nats

    def test_against_adaptive_oracle(self, unit_chr2):
        rng = np.random.default_rng(77)
        for _ in range(5):
            dist = random_valid_dist(rng)
            got = mir_quadrature(unit_chr2, dist)
            assert got.gap_nats == pytest.approx(oracle_gap(dist), rel=1e-8, abs=1e-12)

    def test_degenerate_input_carries_nothing(self, unit_chr2):
        dist = TruncatedGaussianSpec(1.0, 1e-8, 1e-5, 2.0)
        assert mir_quadrature(unit_chr2, dist).value < 1e-8

    def test_inside_bounds_sandwich(self, unit_chr2, canonical_dist):
        value = mir_quadrature(unit_chr2, canonical_dist).value
        pair = mir_bounds(unit_chr2, canonical_dist, 2)
        assert pair.lower - 1e-9 <= value <= pair.upper + 1e-9

    def test_scale_consistency(self, canonical_dist):
        # dividing the sensitive rate by q while scaling the input by q
        # leaves the product of gain and gap unchanged
        q = 2.0
        base = mir_quadrature(chr2_skeleton(), canonical_dist)
        scaled = mir_quadrature(
            chr2_skeleton(q12=1.0 / q),
            TruncatedGaussianSpec(
                q * canonical_dist.mu_bar,
                q * canonical_dist.sigma_bar,
                q * canonical_dist.a,
                q * canonical_dist.b,
            ),
        )
        assert scaled.value == pytest.approx(base.value, rel=1e-9)

    def test_nonnegative_on_random_inputs(self, unit_chr2):
        rng = np.random.default_rng(123)
        for _ in range(20):
            dist = random_valid_dist(rng)
            assert mir_quadrature(unit_chr2, dist).value >= -1e-9


class TestDiscrete:
    def test_sensitive_pairs_include_diagonal(self, unit_chr2):
        assert set(sensitive_pairs(unit_chr2)) == {(0, 1), (0, 0)}

    def test_degenerate_input(self, unit_chr2):
        dist = TruncatedGaussianSpec(1.0, 1e-8, 1e-5, 2.0)
        assert mir_discrete(unit_chr2, dist, 1e-3).value < 1e-8

    def test_step_too_large_propagates(self, unit_chr2, canonical_dist):
        with pytest.raises(StepTooLarge):
            mir_discrete(unit_chr2, canonical_dist, 0.6)  # exit rate 2 at x=b

    def test_converges_to_quadrature(self, unit_chr2, canonical_dist):
        exact = mir_quadrature(unit_chr2, canonical_dist).value
        errors = [
            abs(mir_discrete(unit_chr2, canonical_dist, dt).value - exact)
            for dt in (1e-3, 5e-4, 2.5e-4)
        ]
        assert errors[0] > errors[1] > errors[2]
        for first, second in zip(errors, errors[1:]):
            assert 1.5 <= first / second <= 2.5

    def test_diagonal_share_vanishes(self, unit_chr2, canonical_dist):
        diag = [
            mir_discrete(unit_chr2, canonical_dist, dt).diagnostics[
                "diagonal_bits_per_s"
            ]
            for dt in (1e-3, 5e-4, 2.5e-4)
        ]
        assert diag[1] <= 0.75 * diag[0]
        assert diag[2] <= 0.75 * diag[1]

    def test_strictly_positive_on_random_inputs(self):
        rng = np.random.default_rng(321)
        for _ in range(20):
            rates = rng.uniform(0.2, 3.0, size=3)
            spec = chr2_skeleton(*map(float, rates))
            dist = random_valid_dist(rng)
            dt = 0.05 / (float(rates.max()) * max(1.0, dist.b))
            assert mir_discrete(spec, dist, dt).value > 0.0

    def test_off_diagonal_term_is_step_free(self, unit_chr2, canonical_dist):
        # sensitive off-diagonal entries are exactly linear in x, so their
        # per-step contribution equals the asymptotic rate at any step
        exact = mir_quadrature(unit_chr2, canonical_dist).value
        r = mir_discrete(unit_chr2, canonical_dist, 1e-3)
        assert r.diagnostics["off_diagonal_bits_per_s"] == pytest.approx(exact, rel=1e-9)


class TestSeries:
    def test_canonical_orders(self, unit_chr2, canonical_dist):
        exact = mir_quadrature(unit_chr2, canonical_dist)
        errors = {}
        for order in (5, 10, 20, 40):
            result = mir_series(unit_chr2, canonical_dist, order)
            errors[order] = abs(result.value - exact.value)
            assert errors[order] <= result.gain / order + 1e-9
            assert result.order == order
        assert errors[40] < errors[5]

    def test_point_mass_vanishes(self, unit_chr2):
        dist = TruncatedGaussianSpec(1.0, 1e-9, 1e-5, 2.0)
        assert abs(mir_series(unit_chr2, dist, 20).value) < 1e-12

    def test_convergence_region_enforced(self, unit_chr2):
        with pytest.raises(OutOfConvergenceRegion):
            mir_series(unit_chr2, TruncatedGaussianSpec(1.0, 0.5, 0.0, 2.0), 10)
        with pytest.raises(OutOfConvergenceRegion):
            mir_series(unit_chr2, TruncatedGaussianSpec(1.0, 0.5, 0.1, 2.5), 10)

    def test_order_limits(self, unit_chr2, canonical_dist):
        with pytest.raises(OrderTooHigh):
            mir_series(unit_chr2, canonical_dist, 65)
        with pytest.raises(ValidationError):
            mir_series(unit_chr2, canonical_dist, 1)

    def test_cross_check_diagnostics(self, unit_chr2, canonical_dist):
        result = mir_series(unit_chr2, canonical_dist, 40)
        assert result.diagnostics["cross_check_diff"] <= result.diagnostics["cross_check_tol"]
        # at the reference point the two forms agree to the sharp tolerance
        assert result.diagnostics["cross_check_diff"] < 1e-9

    def test_matches_adaptive_oracle(self, unit_chr2, canonical_dist):
        got = mir_series(unit_chr2, canonical_dist, 40)
        assert got.gap_nats == pytest.approx(oracle_gap(canonical_dist), abs=1.0 / 40 + 1e-9)

    def test_value_decomposition(self, unit_chr2, canonical_dist):
        result = mir_series(unit_chr2, canonical_dist, 30)
        assert result.value == result.gain * result.gap_nats


class TestMultiSensitiveReceptor:
    """A four-state ring with two sensitive transitions out of different rows."""

    @staticmethod
    def spec():
        from transduction_mir import ReceptorSpec, Transition

        return ReceptorSpec(
            name="two-gate",
            states=("A", "B", "C", "D"),
            transitions=(
                Transition(0, 1, 0.8, True),
                Transition(1, 2, 1.2, False),
                Transition(2, 3, 0.5, True),
                Transition(3, 0, 0.9, False),
            ),
        )

    def test_sensitive_pairs(self):
        assert set(sensitive_pairs(self.spec())) == {(0, 1), (2, 3), (0, 0), (2, 2)}

    def test_gain_sums_over_sensitive_set(self, canonical_dist):
        from transduction_mir import sensitive_gain, stationary_distribution

        spec = self.spec()
        pi = stationary_distribution(spec, canonical_dist.mu)
        g = sensitive_gain(spec, pi)
        expected = (
            pi.probabilities[0] * 0.8 + pi.probabilities[2] * 0.5
        ) / math.log(2.0)
        assert g == pytest.approx(expected, rel=1e-14)

    def test_discrete_converges_to_quadrature(self, canonical_dist):
        spec = self.spec()
        exact = mir_quadrature(spec, canonical_dist).value
        errors = [
            abs(mir_discrete(spec, canonical_dist, dt).value - exact)
            for dt in (2e-3, 1e-3, 5e-4)
        ]
        assert errors[0] > errors[1] > errors[2]
        for first, second in zip(errors, errors[1:]):
            assert 1.5 <= first / second <= 2.5

    def test_series_and_bounds_agree(self, canonical_dist):
        spec = self.spec()
        exact = mir_quadrature(spec, canonical_dist).value
        approx = mir_series(spec, canonical_dist, 40)
        assert abs(approx.value - exact) <= approx.gain / 40 + 1e-9
        for s in (2, 4):
            pair = mir_bounds(spec, canonical_dist, s)
            assert pair.lower - 1e-9 <= exact <= pair.upper + 1e-9


class TestJensenGap:
    def test_frozen(self, canonical_dist):
        assert jensen_gap(canonical_dist) == pytest.approx(CANONICAL_GAP_NATS, rel=1e-10)

    def test_nonnegative(self):
        rng = np.random.default_rng(9)
        for _ in range(15):
            assert jensen_gap(random_valid_dist(rng)) >= -1e-12
