import math

import numpy as np
import pytest

from oracles import PAULI, heisenberg, max_norm, schrodinger_propagator
from temporal_peres.dynamics import (
    HamiltonianSpec,
    PrecessionAngle,
    evolve,
    evolve_axis,
    evolve_x,
    evolve_y,
    evolve_z,
    heisenberg_conjugate,
    heisenberg_rhs,
    propagator,
)
from temporal_peres.pauli import PauliPolynomial, to_dense

P = PauliPolynomial.from_label
Q = PrecessionAngle.quarter
GRID = np.linspace(0, 2 * np.pi, 100, endpoint=False)
FD_STEP = 1e-6


class TestPrecessionAngle:
    @pytest.mark.parametrize(
        "text, quarters",
        [("0", 0), ("pi/2", 1), ("pi", 2), ("3pi/2", 3), ("3*pi/2", 3), ("-pi/2", 3), ("2pi", 0), ("π/2", 1)],
    )
    def test_parse_exact(self, text, quarters):
        angle = PrecessionAngle.parse(text)
        assert angle.exact and angle.quarter_turns == quarters

    def test_parse_inexact(self):
        angle = PrecessionAngle.parse("pi/4")
        assert not angle.exact
        assert angle.value == pytest.approx(math.pi / 4)
        assert PrecessionAngle.parse("1.0").value == 1.0

    @pytest.mark.parametrize("bad", ["pie", "pi/0", "two", ""])
    def test_parse_errors(self, bad):
        with pytest.raises(ValueError):
            PrecessionAngle.parse(bad)

    def test_reduced_to_one_turn(self):
        assert PrecessionAngle.radians(-0.5).value == pytest.approx(2 * math.pi - 0.5)
        assert 0 <= PrecessionAngle.radians(1e-300 - 2 * math.pi).value < 2 * math.pi

    def test_exact_arithmetic(self):
        assert (Q(3) + Q(2)).quarter_turns == 1
        assert (Q(0) - Q(1)).quarter_turns == 3
        assert not (Q(1) + PrecessionAngle.radians(0.1)).exact

    def test_exact_trig(self):
        assert [Q(k).cos() for k in range(4)] == [1, 0, -1, 0]
        assert [Q(k).sin() for k in range(4)] == [0, 1, 0, -1]


class TestEvolve:
    def test_x_no_evolution(self):
        assert evolve_x(Q(0)) == P("X")

    def test_x_quarter_turn(self):
        assert evolve_x(Q(1)).as_term() == P("-Y").as_term()

    def test_x_half_turn(self):
        assert evolve_x(Q(2)) == -P("X")

    def test_y(self):
        assert evolve_y(Q(0)) == P("Y")
        assert evolve_y(Q(1)) == P("X")
        assert evolve_y(Q(3)) == -P("X")

    @pytest.mark.parametrize("theta", [Q(0), Q(1), 1.234])
    def test_z_conserved(self, theta):
        assert evolve_z(theta) == P("Z")

    def test_exact_path_has_no_dust(self):
        # the float path keeps cos(pi/2) ~ 6e-17 only until canonicalization; exact path never sees it
        assert evolve_x(Q(1)).terms == {"Y": -1}

    @pytest.mark.parametrize("theta", GRID[::7])
    @pytest.mark.parametrize("axis", "XYZ")
    def test_matches_expm_heisenberg(self, axis, theta):
        assert max_norm(to_dense(evolve_axis(axis, theta)) - heisenberg(PAULI[axis], theta)) < 1e-12

    @pytest.mark.parametrize("theta", GRID[::9])
    def test_spin_length_conserved(self, theta):
        x, y = evolve_x(theta), evolve_y(theta)
        assert (x * x + y * y).isclose(PauliPolynomial.identity(1).scale(2), atol=1e-12)


class TestHeisenbergRhs:
    def test_x(self):
        assert heisenberg_rhs("X") == -P("Y")

    def test_z(self):
        assert heisenberg_rhs("Z").is_zero()

    def test_y(self):
        assert heisenberg_rhs("Y") == P("X")

    def test_scales_with_omega_not_hbar(self):
        assert heisenberg_rhs("X", HamiltonianSpec(omega=2.5, hbar=0.3)) == P("Y").scale(-2.5)

    def test_invalid_hamiltonian(self):
        with pytest.raises(ValueError):
            HamiltonianSpec(omega=0)

    @pytest.mark.parametrize("axis, evolver", [("X", evolve_x), ("Y", evolve_y)])
    def test_finite_differences(self, axis, evolver):
        rhs = heisenberg_rhs(axis)
        worst = 0.0
        for theta in GRID:
            fd = (evolver(theta + FD_STEP) - evolver(theta - FD_STEP)).scale(1 / (2 * FD_STEP))
            worst = max(worst, fd.max_abs_difference(evolve(rhs, theta)))
        assert worst < 1e-6

    def test_finite_differences_in_time_units(self):
        h = HamiltonianSpec(omega=2.5, hbar=0.7)
        rhs = heisenberg_rhs("X", h)
        for t in np.linspace(0, 2.0, 20):
            fd = (evolve_x(h.omega * (t + FD_STEP)) - evolve_x(h.omega * (t - FD_STEP))).scale(1 / (2 * FD_STEP))
            assert fd.isclose(evolve(rhs, h.omega * t), atol=1e-6)


class TestPropagator:
    def test_zero(self):
        assert np.allclose(propagator(0.0), np.eye(2), atol=1e-15)

    def test_full_turn_is_minus_identity(self):
        assert max_norm(propagator(2 * math.pi) + np.eye(2)) < 1e-12

    def test_quarter_turn_conjugation_orientation(self):
        # must agree with evolve_x(pi/2) = -Y
        assert max_norm(heisenberg_conjugate(PAULI["X"], Q(1)) + PAULI["Y"]) < 1e-12

    @pytest.mark.parametrize("theta", GRID[::5])
    def test_matches_expm(self, theta):
        assert max_norm(propagator(theta) - schrodinger_propagator(theta)) < 1e-12

    @pytest.mark.parametrize("theta", GRID[::5])
    def test_unitary(self, theta):
        u = propagator(theta)
        assert max_norm(u @ u.conj().T - np.eye(2)) < 1e-12

    @pytest.mark.parametrize("a, b", [(0.3, 1.9), (4.0, 5.5), (math.pi, math.pi), (6.0, 0.5)])
    def test_group_property_up_to_sign(self, a, b):
        lhs = propagator(a) @ propagator(b)
        rhs = propagator(PrecessionAngle.radians(a + b))
        assert min(max_norm(lhs - rhs), max_norm(lhs + rhs)) < 1e-12

    @pytest.mark.parametrize("theta", list(GRID[::4]) + [Q(1), Q(2), Q(3)])
    @pytest.mark.parametrize("axis", "XYZ")
    def test_conjugation_consistency(self, axis, theta):
        assert max_norm(heisenberg_conjugate(PAULI[axis], theta) - to_dense(evolve_axis(axis, theta))) < 1e-12
