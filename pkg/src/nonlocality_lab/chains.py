"""Correlation chains (ladders): construction and validation, propagation of
non-vanishing along a chain, duality-closed correlation sets, maximal chains,
in-chain derivability, and the verifier for the impossibility of closing a
chain back onto the complement of its head.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .correlation_engine import (
    DEFAULT_TOL,
    Correlation,
    dual,
    holds,
    normalize,
    partner,
    random_direction,
    random_state,
    solution_space,
)
from .spin_observables import LocalObservable, observable_from_direction
from .tensor_core import frobenius, identity

__all__ = [
    "Chain",
    "ChainPreconditionError",
    "CorrelationSet",
    "Prop2Report",
    "lemma1_check",
    "maximal_chain",
    "prop2_verify",
    "r2_derivable",
    "random_chain",
    "verify_chain",
]


class ChainPreconditionError(ValueError):
    """A chain operation was called outside its stated hypotheses."""


def party_at(j: int) -> int:
    """Party of the 0-based chain position for a chain headed by party 1."""
    return (3 - (-1) ** j) // 2


@dataclass(frozen=True)
class Chain:
    """Ordered alternating-party sequence of local observables."""

    observables: tuple[LocalObservable, ...]

    def __post_init__(self) -> None:
        obs = tuple(self.observables)
        if len(obs) < 1:
            raise ValueError("a chain has at least one observable")
        for a, b in zip(obs, obs[1:]):
            if a.party == b.party:
                raise ValueError("chain parties must strictly alternate")
            if a.n_parties != b.n_parties or a.n_parties != 2:
                raise ValueError("chains are defined for two-party systems")
        object.__setattr__(self, "observables", obs)

    def __len__(self) -> int:
        return len(self.observables)

    def links(self) -> tuple[Correlation, ...]:
        return tuple(
            Correlation(a, b) for a, b in zip(self.observables, self.observables[1:])
        )


@dataclass(frozen=True)
class CorrelationSet:
    """Finite set of directed correlations closed under complement reversal."""

    observables: tuple[LocalObservable, ...]
    correlations: tuple[Correlation, ...]

    def __post_init__(self) -> None:
        keys = {c.key() for c in self.correlations}
        for c in self.correlations:
            if dual(c).key() not in keys:
                raise ValueError(f"set is not closed under duality: missing dual of {c!r}")
        obs_keys = {o.key() for o in self.observables}
        for c in self.correlations:
            if c.source.key() not in obs_keys or c.target.key() not in obs_keys:
                raise ValueError("correlation endpoint missing from observable set")

    @classmethod
    def closure(cls, correlations) -> "CorrelationSet":
        """Close the given correlations under duality and collect endpoints."""
        by_key: dict = {}
        for c in correlations:
            by_key[c.key()] = c
            d = dual(c)
            by_key.setdefault(d.key(), d)
        obs: dict = {}
        for c in by_key.values():
            obs.setdefault(c.source.key(), c.source)
            obs.setdefault(c.target.key(), c.target)
        return cls(tuple(obs.values()), tuple(by_key.values()))


def verify_chain(c: Chain, psi, tol: float = DEFAULT_TOL) -> bool:
    """True iff every adjacent correlation of the chain holds for psi."""
    v = normalize(psi)
    return all(holds(link, v, tol) for link in c.links())


def lemma1_check(c: Chain, psi, tol: float = DEFAULT_TOL) -> bool:
    """Non-vanishing propagates down a verified chain.

    Requires the chain to hold for psi and the head not to annihilate psi.
    A ``False`` return would contradict the propagation lemma and indicates a
    bug or a miscalibrated tolerance.
    """
    v = normalize(psi)
    if not verify_chain(c, v, tol):
        raise ChainPreconditionError("chain correlations do not hold for psi")
    head_norm = float(np.linalg.norm(c.observables[0].matrix @ v))
    if head_norm <= tol:
        raise ChainPreconditionError("chain head annihilates psi")
    return all(
        float(np.linalg.norm(o.matrix @ v)) > tol for o in c.observables
    )


def maximal_chain(b: CorrelationSet, start: LocalObservable, psi) -> Chain:
    """Grow the unique maximal chain of ``b`` through ``start`` in both directions.

    Uniqueness of each extension is guaranteed by the unique-partner property;
    two distinct extensions mean the input set is inconsistent.
    """
    v = normalize(psi)
    obs_keys = {o.key() for o in b.observables}
    if start.key() not in obs_keys:
        raise ValueError("start observable is not in the set")
    for c in b.correlations:
        if not holds(c, v):
            raise ChainPreconditionError(f"correlation {c!r} does not hold for psi")
    if float(np.linalg.norm(start.matrix @ v)) <= DEFAULT_TOL:
        raise ChainPreconditionError("start observable annihilates psi")

    outgoing: dict = {}
    incoming: dict = {}
    for c in b.correlations:
        outgoing.setdefault(c.source.key(), {})[c.target.key()] = c.target
        incoming.setdefault(c.target.key(), {})[c.source.key()] = c.source

    def unique_step(table, node):
        nexts = table.get(node.key(), {})
        if len(nexts) > 1:
            raise ValueError(
                "two distinct correlation partners: inconsistent input set"
            )
        return next(iter(nexts.values())) if nexts else None

    forward = [start]
    seen = {start.key()}
    node = start
    while (nxt := unique_step(outgoing, node)) is not None and nxt.key() not in seen:
        forward.append(nxt)
        seen.add(nxt.key())
        node = nxt
    backward = []
    node = start
    while (prv := unique_step(incoming, node)) is not None and prv.key() not in seen:
        backward.append(prv)
        seen.add(prv.key())
        node = prv
    members = list(reversed(backward)) + forward
    return Chain(tuple(members))


def r2_derivable(c: Chain, i: int, j: int) -> bool:
    """Within a chain, position i implies position j iff i <= j (1-based)."""
    if not (1 <= i <= len(c) and 1 <= j <= len(c)):
        raise ValueError("positions out of range")
    return i <= j


@dataclass(frozen=True)
class Prop2Report:
    """Result of closing a chain onto the complement of its head.

    ``max_head_norm`` is the largest action of the head observable on any
    admissible state; the impossibility result predicts it vanishes.  The
    cascade lists the operator identities forced by assuming a surviving head,
    ending in the self-complement equation whose residual ||2P - 1||_F is
    sqrt(2) for every rank-1 projector.
    """

    admissible_dim: int
    max_head_norm: float
    cascade: tuple[tuple[int, int, int], ...]
    impossible_residual: float
    head_annihilated: bool


def prop2_verify(c: Chain, k: int, tol: float = DEFAULT_TOL) -> Prop2Report:
    """Check that closing a chain with S2(pos 2k) -> 1 - S1(pos 1) kills the head.

    Builds the chain links plus the closure correlation, solves for all
    admissible states, and measures the head observable on each basis state.
    The identity cascade records, for j = 1..2k, the forced identity between
    position 1+j and the complement of position 2k+1-j (1-based); at j = k it
    degenerates into the equation P = 1 - P, exhibited by its Frobenius
    residual.
    """
    if len(c) < 2 * k + 1:
        raise ValueError("chain too short for the requested closure index")
    if k < 1:
        raise ValueError("closure index must be at least 1")
    head = c.observables[0]
    closer = c.observables[2 * k - 1]
    if closer.party == head.party:
        raise ValueError("closure source must sit on the other party")
    correlations = list(c.links()) + [Correlation(closer, head.complement())]
    basis = solution_space(correlations, n_parties=2, tol=min(tol, 1e-12))
    max_head = 0.0
    for v in basis:
        max_head = max(max_head, float(np.linalg.norm(head.matrix @ v)))
    middle = c.observables[k]  # 1-based position k+1
    residual = frobenius(2.0 * middle.projector - identity(2))
    return Prop2Report(
        admissible_dim=len(basis),
        max_head_norm=max_head,
        cascade=tuple((j, 1 + j, 2 * k + 1 - j) for j in range(1, 2 * k + 1)),
        impossible_residual=residual,
        head_annihilated=max_head <= tol,
    )


def random_chain(
    length: int, rng: np.random.Generator, min_link_norm: float = 1e-2
) -> tuple[Chain, np.ndarray]:
    """Generic chain holding for a Haar-random two-qubit state.

    Directions are read off the unique-partner construction; draws whose
    intermediate conditional vectors come too close to vanishing are rejected
    so the sweep stays in generic position.
    """
    if length < 2:
        raise ValueError("length must be at least 2")
    while True:
        psi = random_state(4, rng)
        head = observable_from_direction(random_direction(rng), 1, 2)
        if float(np.linalg.norm(head.matrix @ psi)) < min_link_norm:
            continue
        members = [head]
        ok = True
        current = head
        for _ in range(length - 1):
            try:
                current = partner(psi, current, tol=min_link_norm)
            except ValueError:
                ok = False
                break
            members.append(current)
        if ok:
            return Chain(tuple(members)), psi
