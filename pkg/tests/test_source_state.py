import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from duality_sim import (
    Purification,
    SourceState,
    ValidationError,
    duality_sum_identity,
    maximally_mixed,
    mixed_family,
    purity,
    trace_out,
)

from conftest import random_state, random_unit
from oracles import brute_force_reduced

SQRT_HALF = math.sqrt(0.5)


class TestTraceOut:
    def test_identical_environments(self):
        s = trace_out(Purification(SQRT_HALF, SQRT_HALF, [1.0], [1.0]))
        assert s.p_a == pytest.approx(0.5, abs=1e-15)
        assert s.p_b == pytest.approx(0.5, abs=1e-15)
        assert s.gamma == pytest.approx(0.5, abs=1e-15)

    def test_orthogonal_environments(self):
        s = trace_out(Purification(SQRT_HALF, SQRT_HALF, [1, 0], [0, 1]))
        assert (s.p_a, s.p_b) == pytest.approx((0.5, 0.5))
        assert s.gamma == 0

    def test_partial_overlap(self):
        # <n|m> = 0.6 e^{i pi/3}: take n = (1, 0), m = (0.6 e^{i pi/3}, 0.8)
        m = [cmath.rect(0.6, math.pi / 3), 0.8]
        s = trace_out(Purification(math.sqrt(0.7), math.sqrt(0.3), m, [1, 0]))
        assert s.p_a == pytest.approx(0.7, abs=1e-12)
        assert s.p_b == pytest.approx(0.3, abs=1e-12)
        assert abs(s.gamma) == pytest.approx(0.2749545416973504, abs=1e-12)
        assert cmath.phase(s.gamma) == pytest.approx(math.pi / 3, abs=1e-12)

    @pytest.mark.parametrize("dim", [1, 2, 3, 4])
    def test_matches_brute_force_partial_trace(self, rng, dim):
        for _ in range(50):
            c = random_unit(rng, 2)
            m, n = random_unit(rng, dim), random_unit(rng, dim)
            expected = brute_force_reduced(c[0], c[1], m, n)
            got = trace_out(Purification(c[0], c[1], m, n)).matrix
            np.testing.assert_allclose(got, expected, rtol=0, atol=1e-12)

    def test_cauchy_schwarz_never_violated(self, rng):
        for _ in range(2000):
            dim = int(rng.integers(1, 9))
            c = random_unit(rng, 2)
            s = trace_out(Purification(c[0], c[1], random_unit(rng, dim), random_unit(rng, dim)))
            assert abs(s.gamma) <= math.sqrt(s.p_a * s.p_b) + 1e-12


class TestValidation:
    def test_unnormalized_amplitudes_rejected(self):
        with pytest.raises(ValidationError, match=r"c_a"):
            Purification(0.9, 0.9, [1], [1])

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError, match="equal dimension"):
            Purification(1, 0, [1, 0], [1])

    def test_environment_norm_rejected(self):
        with pytest.raises(ValidationError, match=r"\|\|n\|\|"):
            Purification(1, 0, [1], [0.5])

    def test_tiny_error_renormalized_with_warning(self):
        with pytest.warns(UserWarning, match="renormalizing"):
            p = Purification(math.sqrt(0.5 + 1e-10), SQRT_HALF, [1], [1])
        assert abs(p.c_a) ** 2 + abs(p.c_b) ** 2 == pytest.approx(1, abs=1e-15)

    def test_cauchy_schwarz_violation_named(self):
        with pytest.raises(ValidationError, match="Cauchy-Schwarz"):
            SourceState(0.7, 0.3, 0.5)

    def test_negative_probability(self):
        with pytest.raises(ValidationError):
            SourceState(1.2, -0.2)

    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValidationError, match="p_a \\+ p_b"):
            SourceState(0.5, 0.4)

    def test_gamma_just_over_bound_is_clipped(self):
        with pytest.warns(UserWarning, match="clipping"):
            s = SourceState(0.5, 0.5, 0.5 + 1e-10)
        assert abs(s.gamma) == pytest.approx(0.5, abs=1e-15)

    def test_direct_construction_quiet(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            SourceState(0.25, 0.75, cmath.rect(math.sqrt(0.25 * 0.75), 1.0))

    def test_from_matrix_roundtrip(self):
        s = SourceState(0.7, 0.3, 0.2j)
        assert SourceState.from_matrix(s.matrix) == s


class TestPurity:
    def test_maximally_mixed(self):
        assert purity(SourceState(0.5, 0.5, 0)) == 0.0

    def test_pure_one_sided(self):
        assert purity(SourceState(1.0, 0.0, 0)) == 1.0

    def test_partially_mixed(self):
        assert purity(SourceState(0.7, 0.3, 0.3)) == pytest.approx(0.7211102550927979, abs=1e-12)

    @given(
        p_a=st.floats(0, 1),
        mixing=st.floats(0, 1),
        phases=st.lists(st.floats(-10, 10), min_size=2, max_size=2),
    )
    def test_independent_of_gamma_phase(self, p_a, mixing, phases):
        a = mixed_family(p_a, mixing, phases[0])
        b = mixed_family(p_a, mixing, phases[1])
        assert purity(a) == pytest.approx(purity(b), abs=1e-14)

    @given(p_a=st.floats(0, 1), phase=st.floats(-math.pi, math.pi))
    def test_pure_states_have_unit_purity(self, p_a, phase):
        assert purity(mixed_family(p_a, 1.0, phase)) == pytest.approx(1.0, abs=1e-12)

    def test_in_unit_interval(self, rng):
        for _ in range(1000):
            assert 0.0 <= purity(random_state(rng)) <= 1.0


class TestIdentity:
    def test_maximally_mixed(self):
        assert duality_sum_identity(maximally_mixed()) == pytest.approx((0, 0, 0), abs=1e-15)

    @pytest.mark.parametrize("p_a", [0.0, 0.2, 0.5, 0.9, 1.0])
    def test_pure(self, p_a):
        assert duality_sum_identity(mixed_family(p_a, 1.0, 0.4)) == pytest.approx((1, 1, 1), abs=1e-12)

    def test_hand_evaluated(self):
        assert duality_sum_identity(SourceState(0.7, 0.3, 0.3)) == pytest.approx((0.52,) * 3, abs=1e-12)

    def test_three_forms_agree(self, rng):
        for _ in range(10_000):
            lhs, det_form, trace_form = duality_sum_identity(random_state(rng))
            assert abs(lhs - det_form) <= 1e-12
            assert abs(lhs - trace_form) <= 1e-12

    def test_det_form_matches_numpy_determinant(self, rng):
        for _ in range(200):
            s = random_state(rng)
            _, det_form, trace_form = duality_sum_identity(s)
            rho = s.matrix
            assert det_form == pytest.approx(1 - 4 * np.linalg.det(rho).real, abs=1e-12)
            assert trace_form == pytest.approx(2 * np.trace(rho @ rho).real - 1, abs=1e-12)


class TestMixedFamily:
    def test_pure_symmetric(self):
        s = mixed_family(0.5, 1, 0)
        assert (s.p_a, s.p_b, s.gamma) == pytest.approx((0.5, 0.5, 0.5))

    def test_dephased(self):
        assert mixed_family(0.5, 0, 0) == maximally_mixed()

    def test_mixing_ratio(self):
        s = mixed_family(0.7, 0.6547, math.pi / 4)
        assert abs(s.gamma) == pytest.approx(0.3, abs=1e-4)
        assert cmath.phase(s.gamma) == pytest.approx(math.pi / 4)

    @pytest.mark.parametrize("args", [(1.1, 0.5, 0), (0.5, -0.1, 0), (0.5, 1.5, 0), (0.5, 0.5, math.inf)])
    def test_out_of_range(self, args):
        with pytest.raises(ValidationError):
            mixed_family(*args)

    @settings(max_examples=200)
    @given(p_a=st.floats(0, 1), mixing=st.floats(0, 1), phase=st.floats(-20, 20))
    def test_always_valid(self, p_a, mixing, phase):
        s = mixed_family(p_a, mixing, phase)
        assert s.p_a + s.p_b == pytest.approx(1.0, abs=1e-12)
        assert abs(s.gamma) <= math.sqrt(s.p_a * s.p_b) + 1e-12
