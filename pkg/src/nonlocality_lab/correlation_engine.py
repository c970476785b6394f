"""Quantum side of the argument: outcome probabilities, the state-dependent
correlation criterion, the unique correlation partner, duality, and the linear
solver for states compatible with a correlation set.

A correlation S -> S' holds in state psi iff the probability of the outcome
pair (1, 0) vanishes, equivalently

    <S (1 - S') psi | psi> = 0    iff    S psi = S S' psi.

Both forms are evaluated on every check as a built-in self test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spin_observables import LocalObservable, embed
from .tensor_core import as_vector, frobenius, kernel_basis

__all__ = [
    "Correlation",
    "DEFAULT_TOL",
    "dual",
    "holds",
    "normalize",
    "partner",
    "probability",
    "random_direction",
    "random_state",
    "solution_space",
    "violation",
]

DEFAULT_TOL = 1e-10

# Slack for agreement between the inner-product and vector forms of the
# correlation criterion (both are exact up to arithmetic noise).
_SELF_TEST_SLACK = 1e-9


def normalize(psi) -> np.ndarray:
    """Return psi / ||psi||; rejects the zero vector."""
    v = as_vector(psi)
    n = float(np.linalg.norm(v))
    if n < 1e-14:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform unit vector on the complex sphere of dimension ``dim``."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_direction(rng: np.random.Generator):
    """Uniform direction on the sphere."""
    from .spin_observables import Direction

    z = rng.uniform(-1.0, 1.0)
    return Direction(float(np.arccos(z)), float(rng.uniform(0.0, 2.0 * np.pi)))


@dataclass(frozen=True, eq=False)
class Correlation:
    """Directed correlation source -> target between different parties."""

    source: LocalObservable
    target: LocalObservable

    def __post_init__(self) -> None:
        if self.source.n_parties != self.target.n_parties:
            raise ValueError("source and target live on different systems")
        if self.source.party == self.target.party:
            raise ValueError("correlation requires space-like separated parties")

    def key(self) -> tuple:
        return (self.source.key(), self.target.key())

    def __eq__(self, other) -> bool:
        return isinstance(other, Correlation) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"[{self.source!r} -> {self.target!r}]"


def probability(p, psi) -> float:
    """Probability of outcome 1 for the projector (or observable) ``p`` in state psi."""
    mat = p.matrix if isinstance(p, LocalObservable) else np.asarray(p, dtype=complex)
    v = as_vector(psi)
    if mat.shape != (v.size, v.size):
        raise ValueError(f"dimension mismatch: operator {mat.shape}, state {v.size}")
    val = float(np.vdot(v, mat @ v).real)
    if not -1e-12 <= val <= 1.0 + 1e-12:
        raise ValueError(f"probability {val} outside [0, 1] beyond tolerance")
    return min(max(val, 0.0), 1.0)


def violation(c: Correlation, psi) -> float:
    """Probability of the forbidden outcome pair (1, 0), i.e. <S(1-S')psi|psi>."""
    v = as_vector(psi)
    tpsi = c.target.matrix @ v
    return float(np.vdot(v, c.source.matrix @ (v - tpsi)).real)


def holds(c: Correlation, psi, tol: float = DEFAULT_TOL) -> bool:
    """State-dependent correlation check.

    Evaluates both the vector form ||S psi - S S' psi|| and the inner-product
    form <S (1 - S') psi | psi> and raises if they disagree beyond arithmetic
    slack (the two are algebraically identical for commuting projectors).
    """
    v = as_vector(psi)
    if c.source.matrix.shape[0] != v.size:
        raise ValueError("dimension mismatch between correlation and state")
    spsi = c.source.matrix @ v
    sspsi = c.source.matrix @ (c.target.matrix @ v)
    vec_form = frobenius(spsi - sspsi)
    inner_form = float(np.vdot(v, spsi - sspsi).real)
    if abs(inner_form - vec_form**2) > _SELF_TEST_SLACK:
        raise ArithmeticError(
            f"correlation self-test failed: inner={inner_form}, ||r||^2={vec_form**2}"
        )
    return vec_form <= tol


def dual(c: Correlation) -> Correlation:
    """Complement-reversed correlation: S -> S' becomes (1-S') -> (1-S)."""
    return Correlation(c.target.complement(), c.source.complement())


def partner(psi, f: LocalObservable, tol: float = DEFAULT_TOL) -> LocalObservable:
    """The unique rank-1 observable on the other party correlated with ``f``.

    For a two-party state with F psi != 0 the correlation F -> 1 (x) A pins A
    to the projector onto the conditional vector of psi given outcome 1 for F.
    Uniqueness is among rank-1 projectors (the spin observables used here).
    """
    if f.n_parties != 2:
        raise ValueError("partner construction is defined for two parties")
    v = normalize(psi)
    t = v.reshape(2, 2)
    evals, evecs = np.linalg.eigh(f.projector)
    u = evecs[:, int(np.argmax(evals))]
    if f.party == 1:
        w = u.conj() @ t
    else:
        w = t @ u.conj()
    norm_w = float(np.linalg.norm(w))
    if norm_w <= tol:
        raise ValueError("source annihilates state (unique-partner precondition)")
    w = w / norm_w
    a = np.outer(w, w.conj())
    return embed(a, party=3 - f.party, n_parties=2)


def solution_space(
    rs: list[Correlation] | tuple[Correlation, ...],
    n_parties: int,
    tol: float = DEFAULT_TOL,
) -> list[np.ndarray]:
    """Orthonormal basis of { psi : every correlation in rs holds for psi }.

    Each correlation contributes the linear condition S (1 - S') psi = 0; the
    operators are stacked and the joint numerical kernel returned.  An empty
    list means only psi = 0 is admissible.
    """
    dim = 2**n_parties
    rs = list(rs)
    if not rs:
        return kernel_basis(np.zeros((dim, dim)), tol)
    blocks = []
    for c in rs:
        if c.source.n_parties != n_parties:
            raise ValueError("correlation party count differs from n_parties")
        blocks.append(c.source.matrix @ (np.eye(dim) - c.target.matrix))
    return kernel_basis(np.vstack(blocks), tol)
