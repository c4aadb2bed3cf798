import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sksvd import (certify, eigenvalue_envelope_check, exact_svd,
                   min_over_c_denominator, relative_gaps, sketched_svd,
                   value_envelope, vector_error_bound)

from conftest import planted_matrix

SQRT2 = math.sqrt(2.0)


def grid_min(sigma_i, sigma_j, eps, points=100_001):
    """Brute-force minimum of |si^2 - sj^2 (1 + c eps)| over a uniform c grid."""
    c = np.linspace(-1.0, 1.0, points)
    return float(np.min(np.abs(sigma_i**2 - sigma_j**2 * (1.0 + c * eps))))


sigma_strategy = st.floats(min_value=0.2, max_value=3.0)
eps_strategy = st.floats(min_value=0.05, max_value=0.95)


class TestValueEnvelope:
    def test_known_points(self):
        lo, hi = value_envelope(0.5)
        assert lo == pytest.approx(0.7071067811865476, rel=1e-15)
        assert hi == pytest.approx(1.224744871391589, rel=1e-15)
        lo, hi = value_envelope(0.19)
        assert lo == pytest.approx(0.9, rel=1e-12)
        assert hi == pytest.approx(1.0908712114635715, rel=1e-12)

    def test_degenerate_limit(self):
        lo, hi = value_envelope(1e-14)
        assert lo == pytest.approx(1.0, abs=1e-13)
        assert hi == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.5, 2.0])
    def test_domain(self, eps):
        with pytest.raises(ValueError):
            value_envelope(eps)


class TestMinOverC:
    def test_endpoint_cases(self):
        # minimum at an endpoint of c in [-1, 1]
        assert min_over_c_denominator(2.0, 1.0, 0.1) == pytest.approx(2.9, rel=1e-14)
        assert min_over_c_denominator(1.0, 2.0, 0.1) == pytest.approx(2.6, rel=1e-14)

    def test_equal_values_zero(self):
        assert min_over_c_denominator(1.7, 1.7, 0.3) == 0.0

    def test_interval_straddle_zero(self):
        # 1 lies inside 1.0201 * [0.95, 1.05]
        assert min_over_c_denominator(1.0, 1.01, 0.05) == 0.0

    @pytest.mark.parametrize("si,sj,eps", [(0.0, 1.0, 0.1), (-1.0, 1.0, 0.1),
                                           (1.0, 0.0, 0.1), (1.0, 1.0, 0.0),
                                           (1.0, 1.0, 1.0)])
    def test_domain(self, si, sj, eps):
        with pytest.raises(ValueError):
            min_over_c_denominator(si, sj, eps)

    @given(si=sigma_strategy, sj=sigma_strategy, eps=eps_strategy)
    @settings(max_examples=120, derandomize=True, deadline=None)
    def test_never_exceeds_grid(self, si, sj, eps):
        # the exact minimum can only undercut any finite sample of the objective
        closed = min_over_c_denominator(si, sj, eps)
        assert closed <= grid_min(si, sj, eps, points=2001) + 1e-12

    @given(si=sigma_strategy, sj=sigma_strategy, eps=eps_strategy)
    @settings(max_examples=120, derandomize=True, deadline=None)
    def test_matches_grid_at_endpoint_minima(self, si, sj, eps):
        closed = min_over_c_denominator(si, sj, eps)
        assume(closed > 0.0)  # interior zeros are below grid resolution
        assert abs(closed - grid_min(si, sj, eps, points=2001)) <= 1e-9

    @given(si=sigma_strategy, eps=eps_strategy,
           shift=st.floats(min_value=-0.9, max_value=0.9))
    @settings(max_examples=120, derandomize=True, deadline=None)
    def test_interior_zero_consistent_with_grid(self, si, eps, shift):
        # construct sj so si^2 = sj^2 (1 + shift * eps): the true minimum is 0
        # and the grid can only confirm it to Lipschitz * half-spacing
        sj = si / math.sqrt(1.0 + shift * eps)
        assert min_over_c_denominator(si, sj, eps) == 0.0
        points = 2001
        half_step = 1.0 / (points - 1)
        assert grid_min(si, sj, eps, points=points) <= sj**2 * eps * half_step * (1 + 1e-9)


class TestVectorErrorBound:
    def test_well_separated_pair(self):
        # 0.1 sqrt(1.1)/sqrt(0.9) * sqrt(2)*2*1 / 2.6  and  / 2.9
        assert vector_error_bound([2.0, 1.0], 0.1, 0) == pytest.approx(
            0.12026707076470337, rel=1e-12)
        assert vector_error_bound([2.0, 1.0], 0.1, 1) == pytest.approx(
            0.10782564965111337, rel=1e-12)

    def test_repeated_value_caps(self):
        assert vector_error_bound([5.0, 5.0, 1.0], 0.1, 0) == SQRT2

    def test_singleton_spectrum(self):
        assert vector_error_bound([3.0], 0.3, 0) == 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            vector_error_bound([2.0, -1.0], 0.1, 0)
        with pytest.raises(IndexError):
            vector_error_bound([2.0, 1.0], 0.1, 2)
        with pytest.raises(ValueError):
            vector_error_bound([2.0, 1.0], 1.5, 0)

    @given(data=st.data(), eps=eps_strategy)
    @settings(max_examples=100, derandomize=True, deadline=None)
    def test_caps(self, data, eps):
        k = data.draw(st.integers(1, 6))
        sig = sorted(data.draw(st.lists(sigma_strategy, min_size=k, max_size=k)),
                     reverse=True)
        for j in range(k):
            b = vector_error_bound(sig, eps, j)
            assert 0.0 <= b <= SQRT2


class TestEigenvalueEnvelope:
    def test_exact_match_passes(self):
        lam = np.array([4.0, 1.0])
        assert eigenvalue_envelope_check(lam, lam, 0.1).all()

    def test_boundary_inclusive(self):
        assert eigenvalue_envelope_check([4.0], [4.4], 0.1).all()
        assert eigenvalue_envelope_check([4.0], [3.6], 0.1).all()

    def test_just_outside_fails(self):
        assert not eigenvalue_envelope_check([4.0], [4.41], 0.1).any()

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            eigenvalue_envelope_check([4.0, 1.0], [4.0], 0.1)

    def test_nonpositive_true_rejected(self):
        with pytest.raises(ValueError):
            eigenvalue_envelope_check([0.0], [1.0], 0.1)

    @given(eps=eps_strategy, data=st.data())
    @settings(max_examples=100, derandomize=True, deadline=None)
    def test_consistent_with_value_envelope(self, eps, data):
        # a singular-value ratio inside its envelope squares to an
        # eigenvalue ratio inside [1-eps, 1+eps]
        lo, hi = value_envelope(eps)
        ratio = data.draw(st.floats(min_value=lo, max_value=hi))
        assert eigenvalue_envelope_check([1.0], [ratio**2], eps).all()


class TestRelativeGaps:
    def test_two_values(self):
        gaps = relative_gaps([4.0, 1.0]).relative_gaps
        np.testing.assert_allclose(gaps, [0.75, 3.0], rtol=1e-14)

    def test_three_values(self):
        gaps = relative_gaps([9.0, 4.0, 1.0]).relative_gaps
        np.testing.assert_allclose(gaps, [5.0 / 9.0, 0.75, 3.0], rtol=1e-14)

    def test_equal_values_zero_gap(self):
        assert relative_gaps([2.0, 2.0]).relative_gaps.min() == 0.0

    def test_singleton_empty(self):
        assert relative_gaps([2.0]).relative_gaps.size == 0


class TestCertify:
    def _oracle_and_estimate(self, rng, sigmas=(8.0, 4.0, 2.0, 1.0)):
        X, _, _ = planted_matrix(40, 10, sigmas, rng)
        return exact_svd(X), sketched_svd(X)

    def test_identity_sketch_passes(self, rng):
        decomp, est = self._oracle_and_estimate(rng)
        cert = certify(decomp, est, eps=0.5)
        assert cert.overall_pass
        for rec in cert.records:
            assert rec.ratio == pytest.approx(1.0, abs=1e-12)
            assert rec.vector_err <= 1e-8
            assert rec.value_pass and rec.vector_pass
        assert cert.rank_oracle == cert.rank_estimate == 4
        assert cert.gaps is not None and cert.gaps.relative_gaps.size == 4

    def test_truncated_estimate_flags_rank_mismatch(self, rng):
        decomp, est = self._oracle_and_estimate(rng)
        est.singular_values = est.singular_values[:2]
        est.right_vectors = est.right_vectors[:, :2]
        est.eigenvalues = est.eigenvalues[:2]
        est.rank = 2
        cert = certify(decomp, est, eps=0.5)
        assert not cert.overall_pass
        mismatches = [r for r in cert.records if r.note and "rank mismatch" in r.note]
        assert [r.j for r in mismatches] == [2, 3]
        assert all(not r.value_pass and not r.vector_pass for r in mismatches)

    def test_monotone_in_eps(self, rng):
        decomp, est = self._oracle_and_estimate(rng)
        # perturb the estimated values so ratios are off by ~5 percent
        est.singular_values = est.singular_values * 1.05
        est.eigenvalues = est.singular_values**2
        for eps_small, eps_large in [(0.05, 0.2), (0.11, 0.5), (0.2, 0.9)]:
            small = certify(decomp, est, eps_small)
            large = certify(decomp, est, eps_large)
            for rs, rl in zip(small.records, large.records):
                if rs.value_pass:
                    assert rl.value_pass

    def test_singleton_spectrum_note(self, rng):
        X, _, _ = planted_matrix(20, 6, [3.0], rng)
        cert = certify(exact_svd(X), sketched_svd(X), eps=0.5)
        assert cert.overall_pass
        assert "singleton" in cert.records[0].note

    def test_dimension_mismatch(self, rng):
        decomp, _ = self._oracle_and_estimate(rng)
        other = sketched_svd(rng.standard_normal((9, 9)))
        with pytest.raises(ValueError):
            certify(decomp, other, eps=0.5)

    def test_json_schema_and_meta_echo(self, rng):
        decomp, est = self._oracle_and_estimate(rng)
        cert = certify(decomp, est, eps=0.5, meta={"m": 40, "seed": 7, "trial_id": "t0"})
        d = cert.to_dict()
        assert d["eps"] == 0.5 and d["m"] == 40 and d["seed"] == 7
        assert d["trial_id"] == "t0"
        assert set(d["records"][0]) == {
            "j", "sigma_true", "sigma_est", "ratio", "ratio_lo", "ratio_hi",
            "value_pass", "vector_err", "vector_bound", "vector_pass", "note",
        }
        import json
        json.dumps(d)  # must be serializable as-is
