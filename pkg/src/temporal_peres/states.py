"""Pure state vectors for one spin (dim 2) or two spins (dim 4).

Basis order is ``|up>, |down>`` on one site and ``|uu>, |ud>, |du>, |dd>`` on
two sites, site 1 leftmost.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

NORM_ATOL = 1e-12

STATE_NAMES = ("up", "down", "plus", "singlet", "random")

_ONE_SITE = {
    "up": np.array([1, 0], dtype=complex),
    "down": np.array([0, 1], dtype=complex),
    "plus": np.array([1, 1], dtype=complex) / np.sqrt(2),
}
_RANDOM_RE = re.compile(r"^random(?:[:(](\d+)\)?)?$")


class StateError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitudes; the array is copied and made read-only."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size not in (2, 4):
            raise StateError(f"state dimension must be 2 or 4, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise StateError(f"state is not normalized (norm = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> StateVector:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise StateError("cannot normalize the zero vector")
        return cls(amps / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_sites(self) -> int:
        return 1 if self.dim == 2 else 2

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.vdot(self.amplitudes, op @ self.amplitudes))

    def fidelity(self, other: StateVector) -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


def make_state(name: str, n_sites: int | None = None, seed: int | None = None) -> StateVector:
    """Build a named state.

    ``up``, ``down`` and ``plus`` are single-spin states; with ``n_sites=2`` they
    become product states such as ``|uu>``. ``singlet`` is
    ``(|ud> - |du>)/sqrt(2)``. ``random`` draws a Haar-random state from a
    complex Gaussian with the given seed; ``"random:7"`` is accepted as
    shorthand for ``name="random", seed=7``.
    """
    key = name.strip().lower()
    match = _RANDOM_RE.match(key)
    if match is not None:
        if match.group(1) is not None:
            seed = int(match.group(1))
        return random_state(n_sites or 1, seed)
    if key == "singlet":
        if n_sites not in (None, 2):
            raise StateError("the singlet is a two-site state")
        return StateVector(np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2))
    if key in _ONE_SITE:
        single = _ONE_SITE[key]
        if (n_sites or 1) == 1:
            return StateVector(single)
        if n_sites == 2:
            return StateVector(np.kron(single, single))
        raise StateError(f"unsupported site count {n_sites}")
    raise StateError(f"unknown state {name!r}; expected one of {', '.join(STATE_NAMES)}")


def random_state(n_sites: int = 1, seed: int | None = None) -> StateVector:
    if n_sites not in (1, 2):
        raise StateError(f"unsupported site count {n_sites}")
    rng = np.random.default_rng(seed)
    dim = 2**n_sites
    return StateVector.normalized(rng.normal(size=dim) + 1j * rng.normal(size=dim))
