"""Monte Carlo of ideal sequential projective spin measurements.

Temporal runs work in the Schrodinger picture: the state is propagated to
``t1``, the first spin component is measured, the collapsed state is
propagated to ``t2`` and the second component is measured. Spatial runs
measure the particle-1 factor and then the particle-2 factor of a two-spin
context.

Randomness is counter based: trial ``k`` of a run with seed ``s`` always
consumes raw draws ``2k`` and ``2k+1`` of the Philox stream keyed by ``s``, so
runs can be split into blocks and merged without changing a single outcome.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .contexts import Context, eigen_action
from .dynamics import PrecessionAngle, as_angle, propagator
from .pauli import PauliPolynomial, to_dense
from .states import StateVector

INVOLUTION_ATOL = 1e-10
DRAWS_PER_TRIAL = 2
MAX_SEED = 2**64 - 1

CSV_COLUMNS = ("trial", "context_id", "outcome_t1", "outcome_t2", "product")


class SimulationError(ValueError):
    """Invalid simulation input (bad observable, rejected context, dimension mismatch)."""


@dataclass(frozen=True)
class Branches:
    """Both outcomes of one projective measurement; ``post[o]`` is None when ``o`` is impossible."""

    p_plus: float
    post: dict[int, StateVector | None]

    def probability(self, outcome: int) -> float:
        return self.p_plus if outcome == 1 else 1.0 - self.p_plus


def measurement_branches(state: StateVector, observable: PauliPolynomial) -> Branches:
    """Born probabilities and collapsed states for an involutory observable."""
    op = to_dense(observable)
    if op.shape[0] != state.dim:
        raise SimulationError(f"observable of dimension {op.shape[0]} on a dimension-{state.dim} state")
    ident = np.eye(state.dim)
    if np.max(np.abs(op - op.conj().T)) > INVOLUTION_ATOL or np.max(np.abs(op @ op - ident)) > INVOLUTION_ATOL:
        raise SimulationError(f"observable {observable} is not an involution (spectrum must be +-1)")
    post: dict[int, StateVector | None] = {}
    p_plus = 0.0
    for outcome in (1, -1):
        projected = (ident + outcome * op) / 2 @ state.amplitudes
        weight = float(np.vdot(projected, projected).real)
        if outcome == 1:
            p_plus = min(max(weight, 0.0), 1.0)
        post[outcome] = StateVector.normalized(projected) if weight > 1e-15 else None
    return Branches(p_plus, post)


@dataclass(frozen=True)
class Measurement:
    outcome: int
    post_state: StateVector
    p_plus: float


def projective_measure(state: StateVector, observable: PauliPolynomial, rng: np.random.Generator) -> Measurement:
    """Measure ``observable`` on ``state``; one uniform draw from ``rng`` picks the branch."""
    branches = measurement_branches(state, observable)
    outcome = 1 if rng.random() < branches.p_plus else -1
    return Measurement(outcome, branches.post[outcome], branches.p_plus)


def trial_uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniforms in ``[0, 1)`` for trials ``start..stop-1``, shape ``(stop-start, 2)``."""
    if not 0 <= seed <= MAX_SEED:
        raise SimulationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if not 0 <= start <= stop:
        raise SimulationError(f"bad trial range [{start}, {stop})")
    offset = DRAWS_PER_TRIAL * start
    bitgen = np.random.Philox(key=seed)
    # Philox emits four raw values per counter step
    bitgen.advance(offset // 4)
    skip = offset % 4
    raw = bitgen.random_raw(DRAWS_PER_TRIAL * (stop - start) + skip)[skip:]
    return ((raw >> np.uint64(11)).astype(np.float64) * 2.0**-53).reshape(-1, DRAWS_PER_TRIAL)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    context_id: int
    outcome_t1: int
    outcome_t2: int
    product: int
    first_outcome_probability: float


@dataclass(frozen=True, eq=False)
class RunSummary:
    """Outcomes of trials ``start .. start+n_trials-1`` of one context.

    ``outcome_t1``/``outcome_t2`` are the first and second measurement (the
    earlier time, or particle 1 then particle 2). ``expected_product`` is the
    eigenvalue of the joint operator on the initial state, or None when the
    initial state is not an eigenstate and the product is not predetermined.
    """

    context_id: int
    seed: int
    start: int
    outcomes_t1: np.ndarray
    outcomes_t2: np.ndarray
    first_outcome_probability: float
    expected_product: int | None

    @property
    def n_trials(self) -> int:
        return int(self.outcomes_t1.size)

    @property
    def products(self) -> np.ndarray:
        return self.outcomes_t1 * self.outcomes_t2

    @property
    def product_histogram(self) -> dict[int, int]:
        plus = int(np.count_nonzero(self.products == 1))
        return {1: plus, -1: self.n_trials - plus}

    @property
    def first_outcome_frequency(self) -> float:
        return float(np.count_nonzero(self.outcomes_t1 == 1)) / self.n_trials

    @property
    def mismatches(self) -> int | None:
        if self.expected_product is None:
            return None
        return int(np.count_nonzero(self.products != self.expected_product))

    @property
    def deterministic(self) -> bool:
        """All trials gave the same product."""
        return len(set(self.products.tolist())) == 1

    def born_sigma(self) -> float:
        p = self.first_outcome_probability
        return math.sqrt(p * (1 - p) / self.n_trials)

    def born_deviation(self) -> float:
        return abs(self.first_outcome_frequency - self.first_outcome_probability)

    def born_consistent(self, n_sigma: float = 3.0) -> bool:
        """First-outcome frequency within ``n_sigma`` binomial standard deviations of the Born value."""
        sigma = self.born_sigma()
        if sigma == 0.0:
            return self.born_deviation() == 0.0
        return self.born_deviation() <= n_sigma * sigma

    def records(self) -> Iterator[TrialRecord]:
        for k, (a, b) in enumerate(zip(self.outcomes_t1.tolist(), self.outcomes_t2.tolist())):
            yield TrialRecord(self.start + k, self.context_id, a, b, a * b, self.first_outcome_probability)

    def merge(self, other: RunSummary) -> RunSummary:
        """Concatenate a following block of the same run."""
        if (other.context_id, other.seed) != (self.context_id, self.seed):
            raise SimulationError("can only merge blocks of the same context and seed")
        if other.start != self.start + self.n_trials:
            raise SimulationError("blocks must be contiguous")
        return RunSummary(
            self.context_id,
            self.seed,
            self.start,
            np.concatenate([self.outcomes_t1, other.outcomes_t1]),
            np.concatenate([self.outcomes_t2, other.outcomes_t2]),
            self.first_outcome_probability,
            self.expected_product,
        )

    def to_json(self) -> dict:
        hist = self.product_histogram
        return {
            "context_id": self.context_id,
            "n_trials": self.n_trials,
            "seed": self.seed,
            "product_histogram": {"+1": hist[1], "-1": hist[-1]},
            "expected_product": self.expected_product,
            "mismatches": self.mismatches,
            "deterministic": self.deterministic,
            "first_outcome_probability": self.first_outcome_probability,
            "first_outcome_frequency": self.first_outcome_frequency,
            "born_sigma": self.born_sigma(),
            "born_consistent": self.born_consistent(),
        }


def _sample(
    first: Branches, second: dict[int, float], n_trials: int, seed: int, start: int
) -> tuple[np.ndarray, np.ndarray]:
    u = trial_uniforms(seed, start, start + n_trials)
    out1 = np.where(u[:, 0] < first.p_plus, 1, -1).astype(np.int8)
    p2 = np.where(out1 == 1, second.get(1, 0.0), second.get(-1, 0.0))
    out2 = np.where(u[:, 1] < p2, 1, -1).astype(np.int8)
    return out1, out2


def _second_stage(first: Branches, advance, observable: PauliPolynomial) -> dict[int, float]:
    """``p_plus`` of the second measurement for each possible first outcome."""
    out = {}
    for outcome, post in first.post.items():
        if post is not None:
            out[outcome] = measurement_branches(advance(post), observable).p_plus
    return out


def _check_trials(n_trials: int) -> None:
    if n_trials < 1:
        raise SimulationError(f"n_trials must be at least 1, got {n_trials}")


def run_temporal_context(
    ctx: Context,
    theta1: PrecessionAngle | float,
    theta2: PrecessionAngle | float,
    initial: StateVector,
    n_trials: int,
    seed: int,
    start: int = 0,
) -> RunSummary:
    """Sequential measurement of ``ctx`` at ``t1`` then ``t2`` starting from ``initial`` at time 0.

    Every trial is drawn from the exact two-level branch tree: both possible
    collapses after ``t1`` are propagated once and reused.
    """
    if ctx.variant != "temporal" or ctx.quantum_eigenvalue is None:
        raise SimulationError("run_temporal_context needs a context from an accepted temporal set")
    if initial.dim != 2:
        raise SimulationError(f"temporal contexts act on one spin, got a dimension-{initial.dim} state")
    _check_trials(n_trials)
    theta1, theta2 = as_angle(theta1), as_angle(theta2)
    (first_event, _), (second_event, _) = ctx.measurement_order
    obs1 = PauliPolynomial.from_label(first_event.axis.value)
    obs2 = PauliPolynomial.from_label(second_event.axis.value)

    at_t1 = StateVector.normalized(propagator(theta1) @ initial.amplitudes)
    hop = propagator(theta2 - theta1)
    first = measurement_branches(at_t1, obs1)
    second = _second_stage(first, lambda s: StateVector.normalized(hop @ s.amplitudes), obs2)
    out1, out2 = _sample(first, second, n_trials, seed, start)
    expected = eigen_action(ctx.joint_operator, initial)
    return RunSummary(ctx.index, seed, start, out1, out2, first.p_plus, expected)


def run_spatial_context(
    ctx: Context, initial: StateVector, n_trials: int, seed: int, start: int = 0
) -> RunSummary:
    """Measure the particle-1 factor, then the particle-2 factor, of a two-spin context."""
    if ctx.variant != "spatial":
        raise SimulationError("run_spatial_context needs a spatial context")
    if initial.dim != 4:
        raise SimulationError(f"spatial contexts act on two spins, got a dimension-{initial.dim} state")
    _check_trials(n_trials)
    (_, obs1), (_, obs2) = ctx.measurement_order
    first = measurement_branches(initial, obs1)
    second = _second_stage(first, lambda s: s, obs2)
    out1, out2 = _sample(first, second, n_trials, seed, start)
    expected = eigen_action(ctx.joint_operator, initial)
    return RunSummary(ctx.index, seed, start, out1, out2, first.p_plus, expected)


def write_trials_csv(summaries: Iterable[RunSummary], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for summary in summaries:
            for rec in summary.records():
                writer.writerow((rec.trial, rec.context_id, rec.outcome_t1, rec.outcome_t2, rec.product))

