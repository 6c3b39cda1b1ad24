import math

import numpy as np
import pytest

from oracles import max_norm, temporal_factor, temporal_joint_operators, temporal_max_factor_commutator, word_matrix
from temporal_peres.contexts import (
    ContextRejected,
    MeasurementEvent,
    assess,
    build_spatial_contexts,
    build_temporal_contexts,
    eigen_action,
    four_factor_operator,
    grid_angle,
    scalar_identity_eigenvalue,
    scan_commuting_angles,
    spatial_factorization_check,
    third_context_factorization_check,
)
from temporal_peres.dynamics import PrecessionAngle
from temporal_peres.pauli import PauliPolynomial, is_hermitian, to_dense
from temporal_peres.states import StateError, StateVector, make_state, random_state

Q = PrecessionAngle.quarter
P = PauliPolynomial.from_label


@pytest.fixture(scope="module")
def temporal():
    return build_temporal_contexts(Q(0), Q(1))


@pytest.fixture(scope="module")
def spatial():
    return build_spatial_contexts()


class TestBuildTemporal:
    def test_quarter_turn_angles(self, temporal):
        joints = [c.joint_operator for c in temporal]
        assert joints == [-PauliPolynomial.identity(1), PauliPolynomial.identity(1), PauliPolynomial.identity(1)]
        assert temporal.eigenvalues == (-1, 1, 1)
        for ours, ref in zip(joints, temporal_joint_operators(0.0, math.pi / 2)):
            assert max_norm(to_dense(ours) - ref) < 1e-12

    def test_written_operator_order(self, temporal):
        labels = [c.label for c in temporal]
        assert labels == ["sx(t2) sy(t1)", "sy(t2) sx(t1)", "sz(t2) sz(t1)"]

    def test_measurement_order_is_chronological(self, temporal):
        for ctx in temporal:
            assert [e.slot for e, _ in ctx.measurement_order] == [1, 2]

    def test_third_context_value_events_are_four_factor(self, temporal):
        assert [e.variable for e in temporal[2].value_events] == ["x^2", "y^2", "y^1", "x^1"]

    def test_equal_times_rejected_as_non_hermitian(self):
        with pytest.raises(ContextRejected) as info:
            build_temporal_contexts(Q(0), Q(0))
        assert any("not Hermitian" in p and "sx(t2) sy(t1)" in p for p in info.value.problems)
        # X Y = iZ
        assert (P("X") * P("Y")).terms == {"Z": 1j}

    def test_quarter_turn_offset(self):
        cs = build_temporal_contexts(math.pi / 4, 3 * math.pi / 4)
        assert cs.eigenvalues == (-1, 1, 1)

    def test_rejection_carries_pair_and_norm(self):
        with pytest.raises(ContextRejected) as info:
            build_temporal_contexts(Q(0), PrecessionAngle.parse("pi/4"))
        exc = info.value
        assert "contexts not mutually commuting" in str(exc)
        assert exc.pair == ("sx(t2)", "sy(t1)")
        # [X(t2), Y] = 2i cos(d) Z
        assert exc.commutator_norm == pytest.approx(2 * math.cos(math.pi / 4), abs=1e-12)

    def test_three_quarter_turn(self):
        assert build_temporal_contexts(Q(0), Q(3)).eigenvalues == (1, -1, 1)

    def test_joint_operators_scalar_with_product_minus_one(self):
        rng = np.random.default_rng(3)
        for theta1 in rng.uniform(0, 2 * np.pi, 10):
            for k in (1, 3):
                cs = build_temporal_contexts(theta1, theta1 + k * math.pi / 2)
                scalars = [scalar_identity_eigenvalue(c.joint_operator) for c in cs]
                assert None not in scalars and math.prod(scalars) == -1


class TestBuildSpatial:
    def test_operators(self, spatial):
        assert [c.joint_operator for c in spatial] == [P("XX"), P("YY"), P("ZZ")]
        assert spatial.eigenvalues == (-1, -1, -1)

    def test_pairwise_commuting(self, spatial):
        ops = [to_dense(c.joint_operator) for c in spatial]
        for a in ops:
            for b in ops:
                assert max_norm(a @ b - b @ a) < 1e-12

    def test_xx_yy_is_minus_zz(self):
        assert P("XX") * P("YY") == -P("ZZ")
        assert max_norm(word_matrix("XX") @ word_matrix("YY") + word_matrix("ZZ")) < 1e-12

    def test_each_squares_to_identity(self, spatial):
        for c in spatial:
            assert c.joint_operator * c.joint_operator == PauliPolynomial.identity(2)

    def test_four_factor_identity(self):
        assert spatial_factorization_check()

    def test_product_state_has_no_eigenvalue_for_xx(self):
        cs = build_spatial_contexts(make_state("up", n_sites=2))
        assert cs.eigenvalues == (None, None, 1)


class TestEigenAction:
    def test_singlet_xx(self):
        assert eigen_action(P("XX"), make_state("singlet")) == -1

    def test_temporal_context_one_on_up(self, temporal):
        assert eigen_action(temporal[0].joint_operator, make_state("up")) == -1

    def test_z_on_plus(self):
        assert eigen_action(P("Z"), make_state("plus")) is None

    def test_unnormalized_state(self):
        with pytest.raises(StateError):
            eigen_action(P("Z"), np.array([1.0, 1.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(StateError):
            eigen_action(P("ZZ"), make_state("up"))

    def test_agrees_with_scalar_detection(self, temporal):
        for ctx in temporal:
            scalar = scalar_identity_eigenvalue(ctx.joint_operator)
            for seed in range(100):
                assert eigen_action(ctx.joint_operator, random_state(1, seed)) == scalar


class TestScalarIdentity:
    def test_context_one(self, temporal):
        assert scalar_identity_eigenvalue(temporal[0].joint_operator) == -1

    def test_four_factor(self):
        assert scalar_identity_eigenvalue(four_factor_operator(Q(0), Q(1))) == 1

    def test_not_scalar(self):
        assert scalar_identity_eigenvalue(P("XX")) is None

    def test_non_unit_scalar(self):
        assert scalar_identity_eigenvalue(PauliPolynomial.identity(1).scale(0.5)) is None


class TestFactorization:
    def test_quarter_turn_angles(self):
        assert third_context_factorization_check(Q(0), Q(1))

    def test_offset_angles(self):
        assert third_context_factorization_check(math.pi / 4, 3 * math.pi / 4)

    def test_random_accepted_pairs(self):
        rng = np.random.default_rng(11)
        for theta1 in rng.uniform(0, 2 * np.pi, 10):
            theta2 = theta1 + math.pi / 2
            build_temporal_contexts(theta1, theta2)
            assert third_context_factorization_check(theta1, theta2)
            f = temporal_factor
            four = f("X", theta2) @ f("Y", theta2) @ f("Y", theta1) @ f("X", theta1)
            zz = f("Z", theta2) @ f("Z", theta1)
            assert max_norm(four - zz) < 1e-12
            assert max_norm(to_dense(four_factor_operator(theta1, theta2)) - four) < 1e-12


class TestScan:
    def test_oracle_commutator_is_two_cos(self):
        for d in np.linspace(0, 2 * np.pi, 37):
            assert temporal_max_factor_commutator(0.0, d) == pytest.approx(2 * abs(math.cos(d)), abs=1e-12)

    def test_grid_360(self):
        rows = scan_commuting_angles(360)
        assert [r.index for r in rows if r.accepted] == [90, 270]
        oracle = [temporal_max_factor_commutator(0.0, 2 * math.pi * k / 360) for k in range(360)]
        assert max(abs(r.commutator_norm - o) for r, o in zip(rows, oracle)) < 1e-12

    def test_grid_8(self):
        assert [r.index for r in scan_commuting_angles(8) if r.accepted] == [2, 6]

    def test_grid_7_misses(self):
        assert not any(r.accepted for r in scan_commuting_angles(7))

    def test_zero_separation_not_hermitian(self):
        assert not scan_commuting_angles(8)[0].hermitian

    def test_offset_sweep(self):
        rows = scan_commuting_angles(8, theta1=1.0)
        assert [r.index for r in rows if r.accepted] == [2, 6]

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            scan_commuting_angles(3)

    def test_exact_grid_points(self):
        assert grid_angle(90, 360).exact and not grid_angle(89, 360).exact

    def test_hermitian_iff_factors_commute(self):
        from temporal_peres.contexts import _temporal_candidates

        for k in range(72):
            delta = grid_angle(k, 72)
            for ctx in _temporal_candidates(Q(0), delta)[:2]:
                a, b = ctx.factors
                commuting = max_norm(to_dense(a) @ to_dense(b) - to_dense(b) @ to_dense(a)) < 1e-10
                assert is_hermitian(ctx.joint_operator) == commuting

    def test_symbolic_and_dense_commutation_agree(self, temporal, spatial):
        for cs in (temporal, spatial):
            assessment = assess(cs.contexts)
            assert assessment.commuting
            for a in cs:
                for b in cs:
                    sym = (a.joint_operator * b.joint_operator - b.joint_operator * a.joint_operator).is_zero()
                    d = to_dense(a.joint_operator) @ to_dense(b.joint_operator)
                    e = to_dense(b.joint_operator) @ to_dense(a.joint_operator)
                    assert sym == (max_norm(d - e) < 1e-12)


def test_measurement_event_rejects_identity():
    with pytest.raises(ValueError):
        MeasurementEvent(1, "I")


def test_state_vector_requires_normalization():
    with pytest.raises(StateError):
        StateVector(np.array([1.0, 1.0]))
