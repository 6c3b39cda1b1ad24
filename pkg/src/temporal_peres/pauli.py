"""Exact Pauli algebra on one and two sites.

Terms carry their phase as an exponent of ``i`` (mod 4), so products of Pauli
words are exact. Polynomials hold complex coefficients keyed by letter word and
are used for time-evolved observables such as ``cos(t) X - sin(t) Y``.

Site 1 is the leftmost letter of a word and the left Kronecker factor when
lowered to a dense matrix.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

#: coefficients smaller than this are dropped from polynomials
CANONICAL_ATOL = 1e-12
#: tolerance for "coefficient is real" in Hermiticity checks
HERMITIAN_ATOL = 1e-12

MAX_SITES = 2

_I_POWERS = (1, 1j, -1, -1j)


class PauliLetter(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"

    def __str__(self) -> str:
        return self.value


# (a, b) -> (phase exponent, letter) for the single-site product a*b
_PRODUCT_TABLE: dict[tuple[str, str], tuple[int, str]] = {}
for _a in "IXYZ":
    _PRODUCT_TABLE[("I", _a)] = (0, _a)
    _PRODUCT_TABLE[(_a, "I")] = (0, _a)
    _PRODUCT_TABLE[(_a, _a)] = (0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT_TABLE[(_a, _b)] = (1, _c)
    _PRODUCT_TABLE[(_b, _a)] = (3, _c)

_DENSE_LETTERS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASE_PREFIX = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_LABEL_RE = re.compile(r"^([+-]?i?)([IXYZ]+)$")


class PauliError(ValueError):
    """Raised on malformed Pauli input or incompatible site counts."""


def _check_word(word: str) -> str:
    if not 1 <= len(word) <= MAX_SITES:
        raise PauliError(f"only 1 or 2 sites are supported, got word {word!r}")
    if any(ch not in "IXYZ" for ch in word):
        raise PauliError(f"invalid Pauli word {word!r}")
    return word


@dataclass(frozen=True)
class PauliTerm:
    """``i**phase`` times a word of Pauli letters."""

    word: str
    phase: int = 0

    def __post_init__(self) -> None:
        _check_word(self.word)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def from_label(cls, label: str) -> PauliTerm:
        """Parse labels like ``"XX"``, ``"-Y"``, ``"iZ"`` or ``"-iZI"``."""
        match = _LABEL_RE.match(label.strip())
        if match is None:
            raise PauliError(f"cannot parse Pauli label {label!r}")
        return cls(match.group(2), _PHASE_PREFIX[match.group(1)])

    @classmethod
    def identity(cls, n_sites: int = 1) -> PauliTerm:
        return cls("I" * n_sites)

    @property
    def n_sites(self) -> int:
        return len(self.word)

    @property
    def letters(self) -> tuple[PauliLetter, ...]:
        return tuple(PauliLetter(ch) for ch in self.word)

    @property
    def coefficient(self) -> complex:
        return _I_POWERS[self.phase]

    @property
    def is_identity(self) -> bool:
        return set(self.word) == {"I"}

    def __mul__(self, other: PauliTerm) -> PauliTerm:
        if not isinstance(other, PauliTerm):
            return NotImplemented
        return multiply_terms(self, other)

    def __neg__(self) -> PauliTerm:
        return PauliTerm(self.word, self.phase + 2)

    def __str__(self) -> str:
        prefix = ("", "i", "-", "-i")[self.phase]
        return prefix + self.word


def multiply_terms(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Exact group product ``a*b`` with the phase tracked mod 4."""
    if a.n_sites != b.n_sites:
        raise PauliError(f"site count mismatch: {a.n_sites} vs {b.n_sites}")
    phase = a.phase + b.phase
    letters = []
    for la, lb in zip(a.word, b.word):
        k, letter = _PRODUCT_TABLE[(la, lb)]
        phase += k
        letters.append(letter)
    return PauliTerm("".join(letters), phase)


def tensor(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Two-site term with ``a`` on site 1 and ``b`` on site 2."""
    if a.n_sites != 1 or b.n_sites != 1:
        raise PauliError("tensor expects two single-site terms")
    return PauliTerm(a.word + b.word, a.phase + b.phase)


def commutes(a: PauliTerm, b: PauliTerm) -> bool:
    """True iff ``a*b == b*a``, i.e. an even number of anticommuting sites."""
    if a.n_sites != b.n_sites:
        raise PauliError(f"site count mismatch: {a.n_sites} vs {b.n_sites}")
    clashes = sum(1 for la, lb in zip(a.word, b.word) if "I" not in (la, lb) and la != lb)
    return clashes % 2 == 0


class PauliPolynomial:
    """Complex linear combination of Pauli words on a fixed number of sites.

    Instances are immutable. Coefficients below :data:`CANONICAL_ATOL` in
    magnitude are dropped on construction, so the zero polynomial has no terms.
    """

    __slots__ = ("_terms", "_n_sites")

    def __init__(self, terms: Mapping[str, complex] | Iterable[tuple[str, complex]], n_sites: int):
        if n_sites not in (1, 2):
            raise PauliError(f"only 1 or 2 sites are supported, got {n_sites}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[str, complex] = {}
        for word, coeff in items:
            if len(_check_word(word)) != n_sites:
                raise PauliError(f"word {word!r} does not have {n_sites} sites")
            merged[word] = merged.get(word, 0j) + complex(coeff)
        self._terms = {w: c for w, c in sorted(merged.items()) if abs(c) >= CANONICAL_ATOL}
        self._n_sites = n_sites

    @classmethod
    def from_term(cls, term: PauliTerm, coeff: complex = 1.0) -> PauliPolynomial:
        return cls({term.word: coeff * term.coefficient}, term.n_sites)

    @classmethod
    def from_label(cls, label: str) -> PauliPolynomial:
        return cls.from_term(PauliTerm.from_label(label))

    @classmethod
    def identity(cls, n_sites: int = 1) -> PauliPolynomial:
        return cls({"I" * n_sites: 1.0}, n_sites)

    @classmethod
    def zero(cls, n_sites: int = 1) -> PauliPolynomial:
        return cls({}, n_sites)

    @property
    def n_sites(self) -> int:
        return self._n_sites

    @property
    def terms(self) -> dict[str, complex]:
        return dict(self._terms)

    def coefficient(self, word: str) -> complex:
        return self._terms.get(word, 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def as_term(self) -> PauliTerm | None:
        """The equivalent exact term if this is a single word times a power of i."""
        if len(self._terms) != 1:
            return None
        ((word, coeff),) = self._terms.items()
        for k, unit in enumerate(_I_POWERS):
            if abs(coeff - unit) < CANONICAL_ATOL:
                return PauliTerm(word, k)
        return None

    def _check_compatible(self, other: PauliPolynomial) -> None:
        if self._n_sites != other._n_sites:
            raise PauliError(f"site count mismatch: {self._n_sites} vs {other._n_sites}")

    def __add__(self, other: PauliPolynomial) -> PauliPolynomial:
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        self._check_compatible(other)
        return PauliPolynomial([*self._terms.items(), *other._terms.items()], self._n_sites)

    def __sub__(self, other: PauliPolynomial) -> PauliPolynomial:
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> PauliPolynomial:
        return self.scale(-1)

    def scale(self, factor: complex) -> PauliPolynomial:
        return PauliPolynomial({w: factor * c for w, c in self._terms.items()}, self._n_sites)

    def __mul__(self, other: PauliPolynomial | complex) -> PauliPolynomial:
        if isinstance(other, PauliPolynomial):
            return poly_multiply(self, other)
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other: complex) -> PauliPolynomial:
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def isclose(self, other: PauliPolynomial, atol: float = CANONICAL_ATOL) -> bool:
        """Coefficientwise comparison within ``atol``."""
        self._check_compatible(other)
        words = set(self._terms) | set(other._terms)
        return all(abs(self.coefficient(w) - other.coefficient(w)) <= atol for w in words)

    def max_abs_difference(self, other: PauliPolynomial) -> float:
        self._check_compatible(other)
        words = set(self._terms) | set(other._terms)
        return max((abs(self.coefficient(w) - other.coefficient(w)) for w in words), default=0.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliPolynomial):
            return NotImplemented
        return self._n_sites == other._n_sites and self.isclose(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"PauliPolynomial({self._terms!r}, n_sites={self._n_sites})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"({_fmt_complex(c)})*{w}" for w, c in self._terms.items())


def _fmt_complex(c: complex) -> str:
    if abs(c.imag) < CANONICAL_ATOL:
        return f"{c.real:g}"
    if abs(c.real) < CANONICAL_ATOL:
        return f"{c.imag:g}i"
    return f"{c.real:g}{c.imag:+g}i"


def poly_multiply(a: PauliPolynomial, b: PauliPolynomial) -> PauliPolynomial:
    """Distribute ``a*b`` over terms and canonicalize."""
    a._check_compatible(b)
    products = []
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            term = multiply_terms(PauliTerm(wa), PauliTerm(wb))
            products.append((term.word, ca * cb * term.coefficient))
    return PauliPolynomial(products, a.n_sites)


def commutator(a: PauliPolynomial, b: PauliPolynomial) -> PauliPolynomial:
    return a * b - b * a


def is_hermitian(p: PauliPolynomial, atol: float = HERMITIAN_ATOL) -> bool:
    """Pauli words are Hermitian, so a polynomial is Hermitian iff its coefficients are real."""
    return all(abs(c.imag) <= atol for c in p.terms.values())


@functools.lru_cache(maxsize=None)
def _dense_word(word: str) -> np.ndarray:
    mat = np.ones((1, 1), dtype=complex)
    for letter in word:
        mat = np.kron(mat, _DENSE_LETTERS[letter])
    mat.setflags(write=False)
    return mat


def to_dense(p: PauliPolynomial | PauliTerm) -> np.ndarray:
    """Lower to a ``2**n x 2**n`` complex matrix (site 1 is the left Kronecker factor)."""
    if isinstance(p, PauliTerm):
        p = PauliPolynomial.from_term(p)
    dim = 2**p.n_sites
    out = np.zeros((dim, dim), dtype=complex)
    for word, coeff in p.terms.items():
        out += coeff * _dense_word(word)
    return out


def dense_commutator_norm(a: PauliPolynomial, b: PauliPolynomial) -> float:
    """Max-abs-entry norm of ``[a, b]`` computed on dense matrices."""
    da, db = to_dense(a), to_dense(b)
    return float(np.max(np.abs(da @ db - db @ da)))


X = PauliPolynomial.from_label("X")
Y = PauliPolynomial.from_label("Y")
Z = PauliPolynomial.from_label("Z")
I1 = PauliPolynomial.identity(1)
I2 = PauliPolynomial.identity(2)
