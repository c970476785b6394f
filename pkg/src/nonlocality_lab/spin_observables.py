"""Spin 1-0 observables from spatial directions.

A direction (theta, phi) on the Bloch sphere maps to the rank-1 projector
onto spin-up along n = (sin t cos p, sin t sin p, cos t):

    P(t, p) = [[cos^2(t/2),            e^{-ip} cos(t/2) sin(t/2)],
               [e^{+ip} cos(t/2) sin(t/2),          sin^2(t/2)  ]]

With this phase convention the chart (theta, phi) -> P is a bijection onto
rank-1 projectors of C^2 and P(n) + P(-n) = 1 holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from .tensor_core import as_matrix, frobenius, identity, is_projector, tensor

__all__ = [
    "Direction",
    "LocalObservable",
    "direction_from_projector",
    "embed",
    "observable_from_direction",
    "projector_from_direction",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Direction:
    """Polar/azimuthal angles in radians; theta in [0, pi], phi wrapped to [0, 2pi)."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("angles must be finite")
        if not -1e-12 <= self.theta <= math.pi + 1e-12:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        object.__setattr__(self, "theta", min(max(self.theta, 0.0), math.pi))
        object.__setattr__(self, "phi", self.phi % _TWO_PI)

    def unit_vector(self) -> np.ndarray:
        st, ct = math.sin(self.theta), math.cos(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), ct])

    def antipode(self) -> "Direction":
        return Direction(math.pi - self.theta, self.phi + math.pi)

    def angle_to(self, other: "Direction") -> float:
        u, v = self.unit_vector(), other.unit_vector()
        # atan2 form stays accurate near 0 and pi, unlike acos of the dot product
        return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


def projector_from_direction(d: Direction) -> np.ndarray:
    """Rank-1 projector for spin-up along ``d``."""
    c, s = math.cos(d.theta / 2.0), math.sin(d.theta / 2.0)
    off = c * s * np.exp(-1j * d.phi)
    return np.array([[c * c, off], [np.conj(off), s * s]], dtype=complex)


def direction_from_projector(p) -> Direction:
    """Invert :func:`projector_from_direction`.

    The inverse is unique for theta in (0, pi); at the poles phi is undefined
    and the canonical representative phi = 0 is returned.
    """
    a = as_matrix(p)
    if a.shape != (2, 2) or not is_projector(a, tol=1e-9) or abs(np.trace(a) - 1.0) > 1e-9:
        raise ValueError("not a spin projector")
    c = math.sqrt(min(max(a[0, 0].real, 0.0), 1.0))
    s = math.sqrt(min(max(a[1, 1].real, 0.0), 1.0))
    theta = 2.0 * math.atan2(s, c)
    if c * s <= 1e-12:
        return Direction(theta, 0.0)
    return Direction(theta, -np.angle(a[0, 1]))


@dataclass(frozen=True, eq=False)
class LocalObservable:
    """A single-qubit rank-1 projector acting on one party of an n-party system."""

    party: int
    n_parties: int
    projector: np.ndarray
    direction: Direction | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.party <= self.n_parties:
            raise ValueError(f"party {self.party} out of range 1..{self.n_parties}")
        p = as_matrix(self.projector)
        if p.shape != (2, 2) or not is_projector(p, tol=1e-9) or abs(np.trace(p) - 1.0) > 1e-9:
            raise ValueError("projector must be a 2x2 rank-1 projector")
        object.__setattr__(self, "projector", p)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Full-space embedding 1 (x) ... (x) P (x) ... (x) 1."""
        factors = [identity(2)] * self.n_parties
        factors[self.party - 1] = self.projector
        return reduce(tensor, factors)

    def complement(self) -> "LocalObservable":
        d = self.direction.antipode() if self.direction is not None else None
        return LocalObservable(self.party, self.n_parties, identity(2) - self.projector, d)

    def key(self) -> tuple:
        ent = np.round(self.projector, 9) + 0.0  # normalize -0.0
        return (self.party, self.n_parties) + tuple(
            (float(z.real), float(z.imag)) for z in ent.reshape(-1)
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalObservable) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        if self.direction is not None:
            return (
                f"S{self.party}(theta={self.direction.theta:.6f},"
                f" phi={self.direction.phi:.6f})"
            )
        return f"S{self.party}(<projector>)"


def embed(p, party: int, n_parties: int, direction: Direction | None = None) -> LocalObservable:
    """Wrap a single-qubit projector as the observable of one party."""
    p = as_matrix(p)
    if direction is None:
        try:
            direction = direction_from_projector(p)
        except ValueError:
            direction = None
    return LocalObservable(party, n_parties, p, direction)


def observable_from_direction(d: Direction, party: int, n_parties: int) -> LocalObservable:
    return LocalObservable(party, n_parties, projector_from_direction(d), d)
