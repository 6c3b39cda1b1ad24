"""Noncontextual hidden-variable value assignments.

A noncontextual model gives every spin observable one predetermined value
``+1`` or ``-1``, the same in every context it appears in, and requires the
product of the values in a context to equal the measured joint outcome. Each
context therefore becomes a monomial constraint ``prod(values) = sign``.

Two independent deciders are provided: brute-force enumeration over all
``2**n`` assignments, and a parity certificate found by linear algebra over
GF(2) (a set of constraints in which every variable appears an even number of
times, but whose signs multiply to ``-1``).
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .contexts import ContextSet

MAX_ENUMERATION_VARIABLES = 24
MAX_NULLSPACE_DIMENSION = 24

_CHUNK = 1 << 20
_VAR_RE = re.compile(r"^([a-z])_([xyz])\^(\d+)$")


class CapacityError(ValueError):
    """The system is too large for exhaustive search."""


class ConsistencyError(AssertionError):
    """The enumeration and parity deciders disagree."""


@dataclass(frozen=True, order=True)
class SignVariable:
    """Predetermined value of the ``axis`` spin at ``slot`` (a time or a particle)."""

    axis: str
    slot: int
    prefix: str = "m"

    def __post_init__(self) -> None:
        if self.axis not in ("x", "y", "z"):
            raise ValueError(f"axis must be x, y or z, got {self.axis!r}")
        if not (isinstance(self.slot, int) and self.slot >= 1):
            raise ValueError(f"slot must be a positive integer, got {self.slot!r}")
        if not re.fullmatch(r"[a-z]", self.prefix):
            raise ValueError(f"prefix must be one lowercase letter, got {self.prefix!r}")

    @classmethod
    def parse(cls, name: str) -> SignVariable:
        match = _VAR_RE.match(name.strip())
        if match is None:
            raise ValueError(f"cannot parse variable name {name!r}; expected e.g. 'm_x^1'")
        prefix, axis, slot = match.groups()
        return cls(axis, int(slot), prefix)

    @property
    def name(self) -> str:
        return f"{self.prefix}_{self.axis}^{self.slot}"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class MonomialConstraint:
    """``prod(variables) == sign``; ``variables`` keeps the written order."""

    variables: tuple[str, ...]
    sign: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ValueError("a constraint needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"repeated variable in constraint {self.variables}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")

    def holds(self, assignment: dict[str, int]) -> bool:
        product = 1
        for name in self.variables:
            product *= assignment[name]
        return product == self.sign

    def __str__(self) -> str:
        return f"{' '.join(self.variables)} = {self.sign:+d}"


@dataclass(frozen=True)
class ConstraintSystem:
    variables: tuple[SignVariable, ...]
    constraints: tuple[MonomialConstraint, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        names = self.names
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable declaration")
        keys = [(v.axis, v.slot) for v in self.variables]
        if len(set(keys)) != len(keys):
            raise ValueError("at most one variable per (axis, slot) pair")
        declared = set(names)
        for c in self.constraints:
            missing = [v for v in c.variables if v not in declared]
            if missing:
                raise ValueError(f"constraint {c} uses undeclared variables {missing}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def without(self, index: int) -> ConstraintSystem:
        return ConstraintSystem(self.variables, self.constraints[:index] + self.constraints[index + 1 :])

    def with_sign(self, index: int, sign: int) -> ConstraintSystem:
        changed = MonomialConstraint(self.constraints[index].variables, sign)
        return ConstraintSystem(
            self.variables, self.constraints[:index] + (changed,) + self.constraints[index + 1 :]
        )

    def is_satisfied_by(self, assignment: dict[str, int]) -> bool:
        return all(c.holds(assignment) for c in self.constraints)

    def to_json(self) -> dict:
        return {
            "variables": list(self.names),
            "constraints": [{"vars": list(c.variables), "sign": c.sign} for c in self.constraints],
        }

    @classmethod
    def from_json(cls, doc: dict) -> ConstraintSystem:
        if not isinstance(doc, dict) or "constraints" not in doc:
            raise ValueError("constraint document needs a 'constraints' list")
        constraints = []
        for entry in doc["constraints"]:
            try:
                constraints.append(MonomialConstraint(tuple(entry["vars"]), int(entry["sign"])))
            except (KeyError, TypeError) as exc:
                raise ValueError(f"malformed constraint entry {entry!r}") from exc
        if "variables" in doc:
            variables = [SignVariable.parse(name) for name in doc["variables"]]
        else:
            seen = dict.fromkeys(v for c in constraints for v in c.variables)
            variables = sorted(SignVariable.parse(name) for name in seen)
        return cls(tuple(variables), tuple(constraints))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> ConstraintSystem:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.constraints)


def constraints_from_contexts(cs: ContextSet) -> ConstraintSystem:
    """One constraint per context: the product of its spin values equals its eigenvalue.

    Temporal variables are named ``m_<axis>^<time slot>``, spatial ones
    ``v_<axis>^<particle>``.
    """
    prefix = "m" if cs.variant == "temporal" else "v"
    constraints = []
    found: set[SignVariable] = set()
    for ctx in cs:
        if ctx.quantum_eigenvalue is None:
            raise ValueError(f"context {ctx.index} ({ctx.label}) has no eigenvalue")
        names = []
        for event in ctx.value_events:
            var = SignVariable(event.axis.value.lower(), event.slot, prefix)
            found.add(var)
            names.append(var.name)
        constraints.append(MonomialConstraint(tuple(names), ctx.quantum_eigenvalue))
    return ConstraintSystem(tuple(sorted(found)), tuple(constraints))


def _row_masks(sys: ConstraintSystem) -> list[int]:
    """Constraint rows as bitmasks; variable 0 is the most significant bit."""
    n = len(sys.variables)
    position = {name: n - 1 - j for j, name in enumerate(sys.names)}
    return [sum(1 << position[v] for v in c.variables) for c in sys.constraints]


def incidence_matrix(sys: ConstraintSystem) -> np.ndarray:
    """Constraint-by-variable 0/1 incidence matrix."""
    index = {name: j for j, name in enumerate(sys.names)}
    out = np.zeros((len(sys.constraints), len(sys.variables)), dtype=np.uint8)
    for i, c in enumerate(sys.constraints):
        for v in c.variables:
            out[i, index[v]] = 1
    return out


def _decode(code: int, names: Sequence[str]) -> dict[str, int]:
    n = len(names)
    return {name: -1 if (code >> (n - 1 - j)) & 1 else 1 for j, name in enumerate(names)}


def satisfying_codes(sys: ConstraintSystem) -> np.ndarray:
    """Integer codes of all satisfying assignments, ascending.

    Bit ``n-1-j`` of a code is set when variable ``j`` takes the value ``-1``,
    so ascending codes are lexicographic order with ``+1`` before ``-1``.
    """
    n = len(sys.variables)
    if n > MAX_ENUMERATION_VARIABLES:
        raise CapacityError(f"{n} variables exceed the exhaustive bound of {MAX_ENUMERATION_VARIABLES}")
    masks = np.array(_row_masks(sys), dtype=np.uint32)
    wants = np.array([c.sign == -1 for c in sys.constraints], dtype=np.uint8)
    total = 1 << n
    found = []
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.uint32)
        ok = np.ones(codes.shape, dtype=bool)
        for mask, want in zip(masks, wants):
            # a constraint holds iff the number of -1 values among its variables has the right parity
            ok &= (np.bitwise_count(codes & mask) & 1) == want
        found.append(codes[ok])
    return np.concatenate(found) if found else np.zeros(0, dtype=np.uint32)


def enumerate_assignments(sys: ConstraintSystem) -> list[dict[str, int]]:
    """Every satisfying +-1 assignment, in lexicographic order (+1 before -1)."""
    names = sys.names
    return [_decode(int(code), names) for code in satisfying_codes(sys)]


def brute_force_assignments(sys: ConstraintSystem) -> list[dict[str, int]]:
    """Reference enumeration with plain ``itertools.product``; small systems only."""
    names = sys.names
    out = []
    for values in itertools.product((1, -1), repeat=len(names)):
        assignment = dict(zip(names, values))
        if sys.is_satisfied_by(assignment):
            out.append(assignment)
    return out


@dataclass(frozen=True)
class ParityCertificate:
    """Constraints (0-based indices) whose variables cancel in pairs but whose signs multiply to -1."""

    constraints: tuple[int, ...]
    sign_product: int

    @property
    def labels(self) -> list[int]:
        """1-based constraint numbers, as used in reports."""
        return [i + 1 for i in self.constraints]

    def verify(self, sys: ConstraintSystem) -> bool:
        counts: dict[str, int] = {}
        sign = 1
        for i in self.constraints:
            c = sys.constraints[i]
            sign *= c.sign
            for v in c.variables:
                counts[v] = counts.get(v, 0) + 1
        return bool(self.constraints) and sign == -1 == self.sign_product and all(
            k % 2 == 0 for k in counts.values()
        )


def left_nullspace_gf2(rows: Sequence[int]) -> list[int]:
    """Basis of ``{s : XOR of rows[i] for i in s == 0}``, each element a bitmask over row indices."""
    pivots: dict[int, tuple[int, int]] = {}  # leading bit -> (reduced row, combination)
    basis = []
    for i, row in enumerate(rows):
        combo = 1 << i
        while row:
            lead = row.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = (row, combo)
                break
            prow, pcombo = pivots[lead]
            row ^= prow
            combo ^= pcombo
        else:
            basis.append(combo)
    return basis


def parity_certificate(sys: ConstraintSystem) -> ParityCertificate | None:
    """Smallest subset of constraints proving unsatisfiability, or None.

    Searches the left null space of the incidence matrix over GF(2) for a
    combination with odd sign parity. Ties in size are broken by the
    lexicographically smallest index tuple.
    """
    rows = _row_masks(sys)
    sign_bits = sum(1 << i for i, c in enumerate(sys.constraints) if c.sign == -1)
    basis = left_nullspace_gf2(rows)
    if not any(bin(b & sign_bits).count("1") % 2 for b in basis):
        return None
    if len(basis) > MAX_NULLSPACE_DIMENSION:
        raise CapacityError(f"null space of dimension {len(basis)} is too large to search")
    best: tuple[int, ...] | None = None
    for picks in itertools.product((0, 1), repeat=len(basis)):
        combo = 0
        for pick, b in zip(picks, basis):
            if pick:
                combo ^= b
        if not combo or bin(combo & sign_bits).count("1") % 2 == 0:
            continue
        subset = tuple(i for i in range(len(rows)) if (combo >> i) & 1)
        if best is None or (len(subset), subset) < (len(best), best):
            best = subset
    return ParityCertificate(best, -1)


@dataclass(frozen=True)
class CrossCheck:
    satisfying_count: int
    certificate: ParityCertificate | None

    @property
    def satisfiable(self) -> bool:
        return self.satisfying_count > 0


def cross_check(sys: ConstraintSystem) -> CrossCheck:
    """Run both deciders and insist they agree.

    For +-1 monomial systems the agreement is two-sided: a certificate exists
    exactly when no assignment does.

    Raises:
        ConsistencyError: on any disagreement, or an invalid certificate.
    """
    count = int(satisfying_codes(sys).size)
    cert = parity_certificate(sys)
    if cert is not None and not cert.verify(sys):
        raise ConsistencyError(f"invalid certificate {cert} for system:\n{sys}")
    if (cert is None) != (count > 0):
        raise ConsistencyError(
            f"deciders disagree: {count} satisfying assignments, certificate={cert}\n{sys}"
        )
    return CrossCheck(count, cert)


def random_system(
    rng: np.random.Generator, max_variables: int = 10, max_constraints: int = 8
) -> ConstraintSystem:
    """A random constraint system for fuzzing the two deciders against each other."""
    n = int(rng.integers(1, max_variables + 1))
    m = int(rng.integers(1, max_constraints + 1))
    slots = [(axis, slot) for slot in range(1, n + 1) for axis in "xyz"][:n]
    variables = tuple(SignVariable(axis, slot) for axis, slot in slots)
    names = [v.name for v in variables]
    constraints = []
    for _ in range(m):
        size = int(rng.integers(1, n + 1))
        chosen = sorted(rng.choice(n, size=size, replace=False).tolist())
        constraints.append(MonomialConstraint(tuple(names[j] for j in chosen), int(rng.choice((1, -1)))))
    return ConstraintSystem(variables, tuple(constraints))

