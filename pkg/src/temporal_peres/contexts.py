"""Measurement contexts for the spatial (two-spin) and temporal (one spin, two times) arguments.

A temporal context is a pair of spin measurements, one at ``t1`` and one at
``t2``, whose joint operator is the product of the Heisenberg-picture
observables. The construction only makes sense at time separations where the
factors commute, so :func:`build_temporal_contexts` verifies this and rejects
other angles.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import reduce
from typing import Literal, Sequence

import numpy as np

from .dynamics import PrecessionAngle, as_angle, evolve_axis
from .pauli import (
    CANONICAL_ATOL,
    PauliLetter,
    PauliPolynomial,
    PauliTerm,
    dense_commutator_norm,
    is_hermitian,
    tensor,
    to_dense,
)
from .states import StateError, StateVector, make_state

#: dense commutator max-norm below which two operators count as commuting
COMMUTE_ATOL = 1e-10
#: vector-norm tolerance for eigen-action checks
EIGEN_ATOL = 1e-10
#: coarsest scan grid; below this quarter turns cannot all be represented
MIN_GRID_POINTS = 4

Variant = Literal["temporal", "spatial"]


@dataclass(frozen=True)
class MeasurementEvent:
    """One spin measurement: ``slot`` is the time (temporal) or the particle (spatial)."""

    slot: int
    axis: PauliLetter

    def __post_init__(self) -> None:
        axis = PauliLetter(self.axis)
        if axis is PauliLetter.I:
            raise ValueError("a measurement axis cannot be the identity")
        if self.slot not in (1, 2):
            raise ValueError(f"slot must be 1 or 2, got {self.slot}")
        object.__setattr__(self, "axis", axis)

    @property
    def variable(self) -> str:
        """Axis/slot key shared by every context this measurement appears in."""
        return f"{self.axis.value.lower()}^{self.slot}"

    def label(self, variant: Variant) -> str:
        ax = self.axis.value.lower()
        return f"s{ax}(t{self.slot})" if variant == "temporal" else f"s{ax}^{self.slot}"


@dataclass(frozen=True)
class Context:
    """A set of co-measurable spin measurements and their joint operator.

    ``events`` are in written operator order (later time / site 1 leftmost).
    ``value_events`` are the spin values entering the hidden-variable
    constraint; they differ from ``events`` only for the third context, whose
    value constraint uses the four-factor x-y-y-x form.
    """

    index: int
    events: tuple[MeasurementEvent, ...]
    factors: tuple[PauliPolynomial, ...]
    joint_operator: PauliPolynomial
    value_events: tuple[MeasurementEvent, ...]
    variant: Variant
    quantum_eigenvalue: int | None = None

    @property
    def measurement_order(self) -> tuple[tuple[MeasurementEvent, PauliPolynomial], ...]:
        """Events paired with their factors, in chronological (or site) order."""
        return tuple(sorted(zip(self.events, self.factors), key=lambda ef: ef[0].slot))

    @property
    def label(self) -> str:
        return " ".join(e.label(self.variant) for e in self.events)


@dataclass(frozen=True)
class ContextSet:
    contexts: tuple[Context, ...]
    variant: Variant
    angles: tuple[PrecessionAngle, PrecessionAngle] | None = None

    @property
    def eigenvalues(self) -> tuple[int | None, ...]:
        return tuple(c.quantum_eigenvalue for c in self.contexts)

    def __iter__(self):
        return iter(self.contexts)

    def __len__(self) -> int:
        return len(self.contexts)

    def __getitem__(self, i: int) -> Context:
        return self.contexts[i]


class ContextRejected(ValueError):
    """The requested angles do not give Hermitian, mutually commuting contexts."""

    def __init__(self, problems: Sequence[str], pair: tuple[str, str] | None, commutator_norm: float):
        self.problems = tuple(problems)
        self.pair = pair
        self.commutator_norm = commutator_norm
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class Assessment:
    """Diagnostics for a candidate context set."""

    commutator_norm: float
    worst_pair: tuple[str, str] | None
    non_hermitian: tuple[str, ...]
    commuting: bool = field(init=False)
    hermitian: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "commuting", self.commutator_norm < COMMUTE_ATOL)
        object.__setattr__(self, "hermitian", not self.non_hermitian)

    @property
    def accepted(self) -> bool:
        return self.commuting and self.hermitian

    def problems(self) -> list[str]:
        out = []
        if not self.commuting:
            a, b = self.worst_pair
            out.append(f"contexts not mutually commuting: [{a}, {b}] has norm {self.commutator_norm:.3g}")
        for name in self.non_hermitian:
            out.append(f"joint operator not Hermitian: {name}")
        return out


def _product(polys: Sequence[PauliPolynomial]) -> PauliPolynomial:
    return reduce(lambda a, b: a * b, polys)


def assess(contexts: Sequence[Context]) -> Assessment:
    """Check factor co-measurability, mutual commutation and Hermiticity on dense matrices."""
    worst, worst_pair = 0.0, None
    named: list[tuple[str, PauliPolynomial]] = []
    for ctx in contexts:
        for (ea, fa), (eb, fb) in itertools.combinations(zip(ctx.events, ctx.factors), 2):
            norm = dense_commutator_norm(fa, fb)
            if norm > worst or worst_pair is None:
                worst, worst_pair = norm, (ea.label(ctx.variant), eb.label(ctx.variant))
        named.append((ctx.label, ctx.joint_operator))
    for (na, a), (nb, b) in itertools.combinations(named, 2):
        norm = dense_commutator_norm(a, b)
        if norm > worst:
            worst, worst_pair = norm, (na, nb)
    non_hermitian = tuple(name for name, op in named if not is_hermitian(op))
    return Assessment(worst, worst_pair, non_hermitian)


_TEMPORAL_LAYOUT = (
    (("X", 2), ("Y", 1)),
    (("Y", 2), ("X", 1)),
    (("Z", 2), ("Z", 1)),
)
_FOUR_FACTOR = (("X", 2), ("Y", 2), ("Y", 1), ("X", 1))


def _events(spec) -> tuple[MeasurementEvent, ...]:
    return tuple(MeasurementEvent(slot, PauliLetter(axis)) for axis, slot in spec)


def _temporal_candidates(theta1: PrecessionAngle, theta2: PrecessionAngle) -> tuple[Context, ...]:
    times = {1: theta1, 2: theta2}
    out = []
    for i, layout in enumerate(_TEMPORAL_LAYOUT, start=1):
        events = _events(layout)
        factors = tuple(evolve_axis(e.axis, times[e.slot]) for e in events)
        value_events = _events(_FOUR_FACTOR) if i == 3 else events
        out.append(Context(i, events, factors, _product(factors), value_events, "temporal"))
    return tuple(out)


def build_temporal_contexts(
    theta1: PrecessionAngle | float = PrecessionAngle.quarter(0),
    theta2: PrecessionAngle | float = PrecessionAngle.quarter(1),
) -> ContextSet:
    """The three sequential-measurement contexts ``x(t2)y(t1)``, ``y(t2)x(t1)``, ``z(t2)z(t1)``.

    Raises:
        ContextRejected: if the factors of a context fail to commute, the joint
            operators fail to commute pairwise, or a joint operator is not
            Hermitian at these angles.
    """
    theta1, theta2 = as_angle(theta1), as_angle(theta2)
    candidates = _temporal_candidates(theta1, theta2)
    verdict = assess(candidates)
    if not verdict.accepted:
        raise ContextRejected(verdict.problems(), verdict.worst_pair, verdict.commutator_norm)
    contexts = tuple(
        replace(c, quantum_eigenvalue=scalar_identity_eigenvalue(c.joint_operator)) for c in candidates
    )
    return ContextSet(contexts, "temporal", (theta1, theta2))


_SPATIAL_LAYOUT = (
    (("X", 1), ("X", 2)),
    (("Y", 1), ("Y", 2)),
    (("Z", 1), ("Z", 2)),
)
_SPATIAL_FOUR_FACTOR = (("X", 1), ("Y", 1), ("Y", 2), ("X", 2))


def site_operator(axis: PauliLetter | str, site: int) -> PauliPolynomial:
    """A single-spin Pauli acting on ``site`` of a two-spin system."""
    letter = PauliTerm(PauliLetter(axis).value)
    ident = PauliTerm("I")
    term = tensor(letter, ident) if site == 1 else tensor(ident, letter)
    return PauliPolynomial.from_term(term)


def build_spatial_contexts(state: StateVector | None = None) -> ContextSet:
    """``X1 X2``, ``Y1 Y2``, ``Z1 Z2`` with eigenvalues read off ``state`` (default: the singlet).

    A context's eigenvalue is left as ``None`` when ``state`` is not one of its
    eigenstates.
    """
    state = state if state is not None else make_state("singlet")
    contexts = []
    for i, layout in enumerate(_SPATIAL_LAYOUT, start=1):
        events = _events(layout)
        factors = tuple(site_operator(e.axis, e.slot) for e in events)
        value_events = _events(_SPATIAL_FOUR_FACTOR) if i == 3 else events
        joint = _product(factors)
        contexts.append(
            Context(i, events, factors, joint, value_events, "spatial", eigen_action(joint, state))
        )
    verdict = assess(contexts)
    if not verdict.accepted:  # pragma: no cover - fixed construction
        raise AssertionError(f"spatial contexts failed verification: {verdict.problems()}")
    return ContextSet(tuple(contexts), "spatial")


def eigen_action(op: PauliPolynomial, state: StateVector | np.ndarray) -> int | None:
    """Return +1 or -1 if ``state`` is an eigenvector of ``op`` with that eigenvalue, else None."""
    if not isinstance(state, StateVector):
        amps = np.asarray(state, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise StateError("eigen_action needs a normalized state")
        state = StateVector(amps)
    if state.dim != 2**op.n_sites:
        raise StateError(f"operator on {op.n_sites} sites cannot act on a dimension-{state.dim} state")
    image = to_dense(op) @ state.amplitudes
    for eigenvalue in (1, -1):
        if np.linalg.norm(image - eigenvalue * state.amplitudes) < EIGEN_ATOL:
            return eigenvalue
    return None


def scalar_identity_eigenvalue(op: PauliPolynomial) -> int | None:
    """+1 or -1 if ``op`` is symbolically that multiple of the identity, else None.

    A scalar operator has the same eigenvalue on every state, which is what
    makes the temporal argument state independent.
    """
    terms = op.terms
    ident = "I" * op.n_sites
    if set(terms) != {ident}:
        return None
    coeff = terms[ident]
    for eigenvalue in (1, -1):
        if abs(coeff - eigenvalue) < CANONICAL_ATOL:
            return eigenvalue
    return None


def four_factor_operator(theta1: PrecessionAngle | float, theta2: PrecessionAngle | float) -> PauliPolynomial:
    """``x(t2) y(t2) y(t1) x(t1)``."""
    times = {1: as_angle(theta1), 2: as_angle(theta2)}
    return _product([evolve_axis(axis, times[slot]) for axis, slot in _FOUR_FACTOR])


def third_context_factorization_check(
    theta1: PrecessionAngle | float, theta2: PrecessionAngle | float
) -> bool:
    """Check ``z(t2) z(t1) == x(t2) y(t2) y(t1) x(t1)`` symbolically and on dense matrices.

    Also checks the same-time relations ``x(t)y(t) = i z(t)`` and
    ``y(t)x(t) = -i z(t)`` at both times, which is what the identity rests on.
    """
    t1, t2 = as_angle(theta1), as_angle(theta2)
    zz = evolve_axis("Z", t2) * evolve_axis("Z", t1)
    four = four_factor_operator(t1, t2)
    for t in (t1, t2):
        x, y, z = (evolve_axis(a, t) for a in "XYZ")
        if not ((x * y).isclose(z.scale(1j)) and (y * x).isclose(z.scale(-1j))):
            return False
    symbolic = zz.isclose(four)
    dense = bool(np.max(np.abs(to_dense(zz) - to_dense(four))) < 1e-12)
    return symbolic and dense


def spatial_factorization_check() -> bool:
    """``Z1 Z2 == X1 Y1 Y2 X2`` symbolically and on dense matrices."""
    zz = site_operator("Z", 1) * site_operator("Z", 2)
    four = _product([site_operator(axis, slot) for axis, slot in _SPATIAL_FOUR_FACTOR])
    return zz.isclose(four) and bool(np.max(np.abs(to_dense(zz) - to_dense(four))) < 1e-12)


@dataclass(frozen=True)
class ScanPoint:
    index: int
    delta: PrecessionAngle
    commutator_norm: float
    commuting: bool
    hermitian: bool

    @property
    def accepted(self) -> bool:
        return self.commuting and self.hermitian


def grid_angle(index: int, grid_points: int) -> PrecessionAngle:
    """``2*pi*index/grid_points``, exact when it lands on a quarter turn."""
    return PrecessionAngle.pi_multiple(Fraction(2 * index, grid_points))


def scan_commuting_angles(
    grid_points: int = 360, theta1: PrecessionAngle | float = PrecessionAngle.quarter(0)
) -> list[ScanPoint]:
    """Sweep ``theta2 - theta1`` over a uniform grid of ``[0, 2*pi)`` and assess each point."""
    if grid_points < MIN_GRID_POINTS:
        raise ValueError(f"grid_points must be at least {MIN_GRID_POINTS}, got {grid_points}")
    theta1 = as_angle(theta1)
    rows = []
    for k in range(grid_points):
        delta = grid_angle(k, grid_points)
        verdict = assess(_temporal_candidates(theta1, theta1 + delta))
        rows.append(ScanPoint(k, delta, verdict.commutator_norm, verdict.commuting, verdict.hermitian))
    return rows
