"""Elements of reality as a mechanized inference system.

Values in {0, 1} are assigned to observables and propagated through
correlations (binary, directed) and outcome-exclusion constraints (arity 4,
used by the four-particle construction).  An observable and its complement are
two views of one underlying bit: internally every observable canonicalizes to
an (atom, polarity) literal, so assigning S = 1 is the same fact as assigning
1 - S = 0 and conflicts surface as a :class:`Contradiction`, never as a silent
overwrite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import product

import numpy as np

from .correlation_engine import Correlation, probability
from .spin_observables import Direction, LocalObservable, observable_from_direction
from .tensor_core import identity, tensor

__all__ = [
    "ConstraintSystem",
    "Contradiction",
    "ExclusionConstraint",
    "RealityLedger",
    "derive_contradiction",
    "exclusions_from_state",
    "ghsz_correlations",
    "lhv_search",
    "propagate",
    "replay_trace",
]

_ZERO_PROB_TOL = 1e-12
_MAX_EXHAUSTIVE = 24


@dataclass(frozen=True, eq=False)
class ExclusionConstraint:
    """One jointly-measurable outcome tuple that never occurs."""

    observables: tuple[LocalObservable, ...]
    forbidden_outcome: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.observables) != len(self.forbidden_outcome):
            raise ValueError("outcome length must match observable count")
        parties = [o.party for o in self.observables]
        if len(set(parties)) != len(parties):
            raise ValueError("exclusion observables must sit on distinct parties")
        if any(b not in (0, 1) for b in self.forbidden_outcome):
            raise ValueError("outcomes are bits")

    def __repr__(self) -> str:
        pairs = ", ".join(
            f"{o!r}={b}" for o, b in zip(self.observables, self.forbidden_outcome)
        )
        return f"never({pairs})"


@dataclass(frozen=True)
class ConstraintSystem:
    """Observables plus binary correlations and/or arity-4 exclusions."""

    observables: tuple[LocalObservable, ...]
    correlations: tuple[Correlation, ...] = ()
    exclusions: tuple[ExclusionConstraint, ...] = ()


def _literal(obs: LocalObservable) -> tuple[tuple, bool]:
    """Canonical (atom, polarity) for an observable; complement flips polarity."""
    k = obs.key()
    kc = obs.complement().key()
    return (k, True) if k <= kc else (kc, False)


class RealityLedger:
    """Partial {0,1} assignment to observables with derivation provenance."""

    def __init__(self) -> None:
        self.assignments: dict = {}
        self.provenance: dict = {}
        self.labels: dict = {}

    def copy(self) -> "RealityLedger":
        out = RealityLedger()
        out.assignments = dict(self.assignments)
        out.provenance = dict(self.provenance)
        out.labels = dict(self.labels)
        return out

    def value(self, obs: LocalObservable) -> int | None:
        atom, pol = _literal(obs)
        v = self.assignments.get(atom)
        if v is None:
            return None
        return v if pol else 1 - v

    def assign(self, obs: LocalObservable, value: int, reason) -> bool:
        """Record obs = value.  Returns False on conflict with an earlier value."""
        if value not in (0, 1):
            raise ValueError("values are bits")
        atom, pol = _literal(obs)
        atom_value = value if pol else 1 - value
        existing = self.assignments.get(atom)
        if existing is not None:
            return existing == atom_value
        self.assignments[atom] = atom_value
        self.provenance[atom] = reason
        self.labels.setdefault(atom, obs)
        return True

    def items(self):
        for atom, v in self.assignments.items():
            yield self.labels[atom], (v if _literal(self.labels[atom])[1] else 1 - v)

    def __len__(self) -> int:
        return len(self.assignments)


@dataclass(frozen=True)
class Contradiction:
    """Both outcome values of one observable are refuted by the constraints."""

    observable: LocalObservable
    derived_correlations: tuple[str, ...]
    trace: tuple


def _excl_status(ledger: RealityLedger, ex: ExclusionConstraint):
    """(number of mismatches, list of unassigned slots) against the forbidden tuple."""
    unassigned = []
    for i, (o, b) in enumerate(zip(ex.observables, ex.forbidden_outcome)):
        v = ledger.value(o)
        if v is None:
            unassigned.append(i)
        elif v != b:
            return 1, unassigned
    return 0, unassigned


def propagate(ledger: RealityLedger, rs, trace: list | None = None):
    """Fixpoint of value propagation; returns a new ledger or a Contradiction.

    Rules: a source with value 1 forces its correlation target to 1 (value-0
    propagation comes from the duality closure of the set); an exclusion with
    three slots matching its forbidden tuple forces the fourth slot away from
    it.  The fixpoint is reached in at most one pass per new assignment and is
    independent of iteration order.
    """
    led = ledger.copy()
    correlations = tuple(rs.correlations)
    exclusions = tuple(getattr(rs, "exclusions", ()))
    changed = True
    while changed:
        changed = False
        for i, c in enumerate(correlations):
            if led.value(c.source) == 1 and led.value(c.target) is None:
                led.assign(c.target, 1, ("corr", i))
                if trace is not None:
                    trace.append(("force", repr(c.target), 1, ("corr", i)))
                changed = True
            if led.value(c.source) == 1 and led.value(c.target) == 0:
                if trace is not None:
                    trace.append(("conflict", ("corr", i)))
                return Contradiction(
                    c.target,
                    (f"{c.source!r} -> {c.target!r}", f"{c.source!r} -> 1-{c.target!r}"),
                    tuple(trace or ()),
                )
        for i, ex in enumerate(exclusions):
            mismatches, unassigned = _excl_status(led, ex)
            if mismatches:
                continue
            if not unassigned:
                if trace is not None:
                    trace.append(("conflict", ("excl", i)))
                return Contradiction(
                    ex.observables[0],
                    (repr(ex),),
                    tuple(trace or ()),
                )
            if len(unassigned) == 1:
                j = unassigned[0]
                forced = 1 - ex.forbidden_outcome[j]
                led.assign(ex.observables[j], forced, ("excl", i))
                if trace is not None:
                    trace.append(("force", repr(ex.observables[j]), forced, ("excl", i)))
                changed = True
    return led


def _atoms_of(rs) -> list[tuple[tuple, LocalObservable]]:
    """Distinct atoms of the system's observables, in a deterministic order."""
    atoms: dict = {}
    for o in rs.observables:
        atom, pol = _literal(o)
        rep = o if pol else o.complement()
        atoms.setdefault(atom, rep)
    return sorted(atoms.items(), key=lambda kv: kv[0])


def _violates(assignment_value, rs) -> bool:
    for c in rs.correlations:
        if assignment_value(c.source) == 1 and assignment_value(c.target) == 0:
            return True
    for ex in getattr(rs, "exclusions", ()):
        if all(
            assignment_value(o) == b
            for o, b in zip(ex.observables, ex.forbidden_outcome)
        ):
            return True
    return False


def lhv_search(rs) -> list[dict]:
    """All deterministic {0,1} assignments consistent with every constraint.

    Exhaustive over the distinct underlying bits; refuses systems too large to
    enumerate (a sampling fallback is out of scope).
    """
    atoms = _atoms_of(rs)
    if len(atoms) > _MAX_EXHAUSTIVE:
        raise ValueError(
            f"{len(atoms)} observables exceed the exhaustive-search limit "
            f"{_MAX_EXHAUSTIVE}; a sampling search would be required"
        )
    keys = [a for a, _ in atoms]
    reps = [r for _, r in atoms]
    models = []
    for bits in product((0, 1), repeat=len(atoms)):
        table = dict(zip(keys, bits))

        def value(obs, table=table):
            atom, pol = _literal(obs)
            v = table[atom]
            return v if pol else 1 - v

        if not _violates(value, rs):
            models.append({rep: bit for rep, bit in zip(reps, bits)})
    return models


def _refute(rs, ledger: RealityLedger, atoms, trace: list) -> bool:
    """True iff no consistent total assignment extends the ledger (DFS)."""
    res = propagate(ledger, rs, trace)
    if isinstance(res, Contradiction):
        return True
    nxt = next(
        ((atom, rep) for atom, rep in atoms if res.assignments.get(atom) is None),
        None,
    )
    if nxt is None:
        trace.append(("model",))
        return False
    atom, rep = nxt
    for val in (1, 0):
        trace.append(("assume", repr(rep), val))
        led = res.copy()
        led.assign(rep, val, ("assume",))
        if not _refute(rs, led, atoms, trace):
            return False
        trace.append(("backtrack", repr(rep), val))
    return True


def derive_contradiction(rs, target: LocalObservable) -> Contradiction | None:
    """Try both outcome values for ``target``; a Contradiction needs both to fail.

    A value fails when seeding it admits no consistent completion: for purely
    binary correlation sets propagation alone decides this; exclusion systems
    additionally case-split over the remaining observables.
    """
    has_exclusions = bool(getattr(rs, "exclusions", ()))
    atoms = _atoms_of(rs)
    if has_exclusions and len(atoms) > _MAX_EXHAUSTIVE:
        raise ValueError("system too large for exhaustive refutation")
    failed = []
    for seed in (1, 0):
        trace: list = [("seed", repr(target), seed)]
        led = RealityLedger()
        led.assign(target, seed, ("seed",))
        if has_exclusions:
            refuted = _refute(rs, led, atoms, trace)
        else:
            refuted = isinstance(propagate(led, rs, trace), Contradiction)
        if refuted:
            failed.append((seed, tuple(trace)))
    if len(failed) == 2:
        return Contradiction(
            observable=target,
            derived_correlations=(
                f"{target!r} -> 1-{target!r}",
                f"1-{target!r} -> {target!r}",
            ),
            trace=tuple(failed),
        )
    return None


def replay_trace(rs, contradiction: Contradiction) -> bool:
    """Re-execute a refutation trace, checking every step against the rules.

    Each forced value and each conflict must be justified by the named
    constraint under the assignment current at that point; assumptions follow
    DFS discipline.  Returns True iff both seed branches replay to refutation.
    """
    correlations = tuple(rs.correlations)
    exclusions = tuple(getattr(rs, "exclusions", ()))
    reps = {repr(rep): rep for _, rep in _atoms_of(rs)}
    reps.setdefault(repr(contradiction.observable), contradiction.observable)
    for o in rs.observables:
        reps.setdefault(repr(o), o)
        reps.setdefault(repr(o.complement()), o.complement())

    def justified_force(led, obs, val, reason) -> bool:
        kind, idx = reason
        if kind == "corr":
            c = correlations[idx]
            return led.value(c.source) == 1 and repr(c.target) == repr(obs) and val == 1
        ex = exclusions[idx]
        mismatches, unassigned = _excl_status(led, ex)
        if mismatches or len(unassigned) != 1:
            return False
        j = unassigned[0]
        return (
            repr(ex.observables[j]) == repr(obs)
            and val == 1 - ex.forbidden_outcome[j]
        )

    def justified_conflict(led, reason) -> bool:
        kind, idx = reason
        if kind == "corr":
            c = correlations[idx]
            return led.value(c.source) == 1 and led.value(c.target) == 0
        mismatches, unassigned = _excl_status(led, exclusions[idx])
        return mismatches == 0 and not unassigned

    def replay_branch(events) -> bool:
        stack: list[RealityLedger] = [RealityLedger()]
        saw_model = False
        for ev in events:
            led = stack[-1]
            if ev[0] == "seed":
                if not led.assign(reps[ev[1]], ev[2], ("seed",)):
                    return False
            elif ev[0] == "force":
                _, name, val, reason = ev
                if name not in reps or not justified_force(led, reps[name], val, reason):
                    return False
                led.assign(reps[name], val, reason)
            elif ev[0] == "conflict":
                if not justified_conflict(led, ev[1]):
                    return False
            elif ev[0] == "assume":
                branch = led.copy()
                if not branch.assign(reps[ev[1]], ev[2], ("assume",)):
                    return False
                stack.append(branch)
            elif ev[0] == "backtrack":
                if len(stack) < 2:
                    return False
                stack.pop()
            elif ev[0] == "model":
                saw_model = True
            else:
                return False
        return not saw_model

    branches = contradiction.trace
    if len(branches) != 2:
        return False
    seeds = {seed for seed, _ in branches}
    return seeds == {0, 1} and all(replay_branch(events) for _, events in branches)


def exclusions_from_state(
    psi: np.ndarray,
    settings: dict[int, tuple[LocalObservable, ...]],
    tol: float = _ZERO_PROB_TOL,
) -> tuple[ExclusionConstraint, ...]:
    """All zero-probability outcome tuples of ``psi`` over per-party settings.

    ``settings`` maps each party to its available observables; every choice of
    one observable per party and every outcome tuple with quantum probability
    at most ``tol`` yields one exclusion constraint.
    """
    parties = sorted(settings)
    out = []
    for combo in product(*(settings[p] for p in parties)):
        for outcome in product((0, 1), repeat=len(parties)):
            factors = [
                o.projector if b == 1 else identity(2) - o.projector
                for o, b in zip(combo, outcome)
            ]
            if probability(reduce(tensor, factors), psi) <= tol:
                out.append(ExclusionConstraint(tuple(combo), tuple(outcome)))
    return tuple(out)


def ghsz_correlations() -> tuple[np.ndarray, ConstraintSystem]:
    """Four-qubit GHZ-type state and its exact x/y outcome-exclusion constraints.

    The observables are spin along x and along y for each of the four parties
    (x on party 1 is the distinguished direction (1, 0, 0)).  Every outcome
    tuple with exactly zero quantum probability in the state becomes an
    exclusion constraint, so the quantum engine itself certifies the set.
    """
    psi = np.zeros(16, dtype=complex)
    psi[0] = psi[15] = 1.0 / math.sqrt(2.0)
    half_pi = math.pi / 2.0
    settings = {
        p: (
            observable_from_direction(Direction(half_pi, 0.0), p, 4),
            observable_from_direction(Direction(half_pi, half_pi), p, 4),
        )
        for p in (1, 2, 3, 4)
    }
    observables = tuple(o for p in (1, 2, 3, 4) for o in settings[p])
    exclusions = exclusions_from_state(psi, settings)
    return psi, ConstraintSystem(observables, (), exclusions)
