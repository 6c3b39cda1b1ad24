"""Larmor precession of a spin-1/2 under ``H = (hbar/2) * omega * Z``.

Everything downstream is parameterized by the precession angle
``theta = omega * t``. Angles that are integer multiples of pi/2 are carried
exactly so the evolved spin components come out as exact Pauli terms.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .pauli import I1, PauliError, PauliLetter, PauliPolynomial, X, Y, Z, commutator

TWO_PI = 2.0 * math.pi

# exact (cos, sin) at k quarter turns
_QUARTER_TRIG = ((1, 0), (0, 1), (-1, 0), (0, -1))


@dataclass(frozen=True)
class PrecessionAngle:
    """A precession angle reduced to ``[0, 2*pi)``.

    ``quarter_turns`` is set (0..3) only when the angle is known to be an exact
    multiple of pi/2; the trig functions then return exact integers.
    """

    value: float
    quarter_turns: int | None = None

    def __post_init__(self) -> None:
        if self.quarter_turns is not None:
            k = int(self.quarter_turns) % 4
            object.__setattr__(self, "quarter_turns", k)
            object.__setattr__(self, "value", k * math.pi / 2)
        else:
            if not math.isfinite(self.value):
                raise ValueError(f"angle must be finite, got {self.value}")
            reduced = math.fmod(self.value, TWO_PI) % TWO_PI
            object.__setattr__(self, "value", 0.0 if reduced >= TWO_PI else reduced)

    @classmethod
    def radians(cls, value: float) -> PrecessionAngle:
        return cls(float(value))

    @classmethod
    def quarter(cls, k: int) -> PrecessionAngle:
        return cls(k * math.pi / 2, quarter_turns=k)

    @classmethod
    def pi_multiple(cls, frac: Fraction | int) -> PrecessionAngle:
        """The angle ``frac * pi``; exact when ``2*frac`` is an integer."""
        frac = Fraction(frac)
        twice = 2 * frac
        if twice.denominator == 1:
            return cls.quarter(int(twice))
        return cls(float(frac) * math.pi)

    @classmethod
    def parse(cls, text: str) -> PrecessionAngle:
        """Parse ``"pi/2"``, ``"3pi/4"``, ``"-3*pi/2"``, ``"π"`` or plain radians like ``"1.0"``."""
        return cls.pi_multiple(_parse_pi_fraction(text)) if _has_pi(text) else _parse_plain(text)

    @property
    def exact(self) -> bool:
        return self.quarter_turns is not None

    def cos(self) -> float:
        if self.quarter_turns is not None:
            return _QUARTER_TRIG[self.quarter_turns][0]
        return math.cos(self.value)

    def sin(self) -> float:
        if self.quarter_turns is not None:
            return _QUARTER_TRIG[self.quarter_turns][1]
        return math.sin(self.value)

    def __add__(self, other: PrecessionAngle) -> PrecessionAngle:
        if self.exact and other.exact:
            return PrecessionAngle.quarter(self.quarter_turns + other.quarter_turns)
        return PrecessionAngle(self.value + other.value)

    def __neg__(self) -> PrecessionAngle:
        if self.exact:
            return PrecessionAngle.quarter(-self.quarter_turns)
        return PrecessionAngle(-self.value)

    def __sub__(self, other: PrecessionAngle) -> PrecessionAngle:
        return self + (-other)

    def label(self) -> str:
        if self.quarter_turns is not None:
            return ("0", "pi/2", "pi", "3pi/2")[self.quarter_turns]
        return repr(self.value)


def _has_pi(text: str) -> bool:
    return "pi" in text.lower() or "π" in text


_PI_RE = re.compile(r"^([+-]?)(\d+(?:\.\d+)?)?\*?(?:pi|π)(?:/(\d+))?$")


def _parse_pi_fraction(text: str) -> Fraction:
    cleaned = text.strip().lower().replace(" ", "")
    match = _PI_RE.match(cleaned)
    if match is None:
        raise ValueError(f"cannot parse angle {text!r}")
    sign, num, den = match.groups()
    frac = Fraction(num) if num else Fraction(1)
    if den:
        if int(den) == 0:
            raise ValueError(f"zero denominator in angle {text!r}")
        frac /= int(den)
    return -frac if sign == "-" else frac


def _parse_plain(text: str) -> PrecessionAngle:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}") from None
    if value == 0.0:
        return PrecessionAngle.quarter(0)
    return PrecessionAngle.radians(value)


def as_angle(theta: PrecessionAngle | float) -> PrecessionAngle:
    return theta if isinstance(theta, PrecessionAngle) else PrecessionAngle.radians(theta)


@dataclass(frozen=True)
class HamiltonianSpec:
    omega: float = 1.0
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")

    def operator(self) -> PauliPolynomial:
        return Z.scale(self.hbar * self.omega / 2)


def evolve_x(theta: PrecessionAngle | float) -> PauliPolynomial:
    """Heisenberg-picture ``X(t) = cos(theta) X - sin(theta) Y``."""
    theta = as_angle(theta)
    return X.scale(theta.cos()) - Y.scale(theta.sin())


def evolve_y(theta: PrecessionAngle | float) -> PauliPolynomial:
    """Heisenberg-picture ``Y(t) = cos(theta) Y + sin(theta) X``."""
    theta = as_angle(theta)
    return Y.scale(theta.cos()) + X.scale(theta.sin())


def evolve_z(theta: PrecessionAngle | float) -> PauliPolynomial:
    # Z commutes with H and is conserved
    return Z


def evolve_axis(axis: PauliLetter | str, theta: PrecessionAngle | float) -> PauliPolynomial:
    axis = PauliLetter(axis)
    if axis is PauliLetter.X:
        return evolve_x(theta)
    if axis is PauliLetter.Y:
        return evolve_y(theta)
    if axis is PauliLetter.Z:
        return evolve_z(theta)
    return I1


def evolve(p: PauliPolynomial, theta: PrecessionAngle | float) -> PauliPolynomial:
    """Heisenberg-evolve an arbitrary single-site polynomial (linear in its words)."""
    if p.n_sites != 1:
        raise PauliError("Heisenberg evolution is defined for single-site polynomials")
    out = PauliPolynomial.zero(1)
    for word, coeff in p.terms.items():
        out = out + evolve_axis(word, theta).scale(coeff)
    return out


def heisenberg_rhs(axis: PauliLetter | str, h: HamiltonianSpec | None = None) -> PauliPolynomial:
    """``(1 / (i*hbar)) [sigma_axis, H]`` as a polynomial."""
    h = h or HamiltonianSpec()
    axis = PauliLetter(axis)
    if axis is PauliLetter.I:
        raise PauliError("axis must be X, Y or Z")
    sigma = PauliPolynomial.from_label(axis.value)
    return commutator(sigma, h.operator()).scale(1 / (1j * h.hbar))


def propagator(theta: PrecessionAngle | float) -> np.ndarray:
    """Schrodinger propagator ``exp(-i H t / hbar) = diag(exp(-i theta/2), exp(+i theta/2))``.

    Note the half angle: a full turn gives ``-1``. Floats are used unreduced, so
    ``propagator(2*pi) == -1``; a :class:`PrecessionAngle` is already reduced to
    ``[0, 2*pi)`` and therefore only fixes the propagator up to sign.
    """
    half = theta.value / 2 if isinstance(theta, PrecessionAngle) else float(theta) / 2
    return np.diag([np.exp(-1j * half), np.exp(1j * half)])


def heisenberg_conjugate(op: np.ndarray, theta: PrecessionAngle | float) -> np.ndarray:
    """``U^dagger op U`` with ``U = propagator(theta)``, i.e. ``exp(iHt) op exp(-iHt)``."""
    u = propagator(theta)
    return u.conj().T @ op @ u
