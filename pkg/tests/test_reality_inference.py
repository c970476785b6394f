import math

import numpy as np
import pytest

from nonlocality_lab.chains import CorrelationSet, random_chain
from nonlocality_lab.correlation_engine import Correlation, probability
from nonlocality_lab.hardy import build_hardy, schmidt_state
from nonlocality_lab.reality_inference import (
    ConstraintSystem,
    Contradiction,
    ExclusionConstraint,
    RealityLedger,
    derive_contradiction,
    exclusions_from_state,
    ghsz_correlations,
    lhv_search,
    propagate,
    replay_trace,
)
from nonlocality_lab.spin_observables import Direction, observable_from_direction
from nonlocality_lab.tensor_core import identity, tensor


def hardy_set():
    cfg = build_hardy(schmidt_state(0.8), Direction(1.0, 0.0))
    return cfg, CorrelationSet.closure(cfg.correlations())


def test_propagate_hardy_seed_derives_chain_and_nothing_else():
    cfg, cs = hardy_set()
    s1, s2, s3, s4 = cfg.observables()
    ledger = RealityLedger()
    ledger.assign(s1, 1, ("seed",))
    result = propagate(ledger, cs)
    assert isinstance(result, RealityLedger)
    assert result.value(s2) == 1
    assert result.value(s3) == 1
    assert result.value(s4) == 1
    assert len(result) == 4  # seed plus exactly the three derived values


def test_propagate_empty_set_is_fixpoint():
    cfg, _ = hardy_set()
    s1 = cfg.observables()[0]
    ledger = RealityLedger()
    ledger.assign(s1, 1, ("seed",))
    result = propagate(ledger, ConstraintSystem((s1,), (), ()))
    assert isinstance(result, RealityLedger)
    assert len(result) == 1


def test_propagate_detects_two_step_contradiction():
    s = observable_from_direction(Direction(0.4, 0.1), 1, 2)
    t = observable_from_direction(Direction(1.1, 0.7), 2, 2)
    pair = CorrelationSet.closure([Correlation(s, t), Correlation(s, t.complement())])
    ledger = RealityLedger()
    ledger.assign(s, 1, ("seed",))
    result = propagate(ledger, pair)
    assert isinstance(result, Contradiction)


def test_propagate_is_order_independent():
    cfg, cs = hardy_set()
    s1 = cfg.observables()[0]
    reordered = ConstraintSystem(cs.observables, tuple(reversed(cs.correlations)), ())
    for system in (cs, reordered):
        ledger = RealityLedger()
        ledger.assign(s1, 1, ("seed",))
        result = propagate(ledger, system)
        assert isinstance(result, RealityLedger)
        assert sorted(result.assignments.items()) == sorted(
            propagate_reference(cs, s1).assignments.items()
        )


def propagate_reference(cs, seed_obs):
    ledger = RealityLedger()
    ledger.assign(seed_obs, 1, ("seed",))
    out = propagate(ledger, cs)
    assert isinstance(out, RealityLedger)
    return out


def test_ghsz_state_properties():
    psi, system = ghsz_correlations()
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-12
    # Schmidt rank 2 across every bipartition
    for axes in ((0,), (1,), (2,), (3,), (0, 1), (0, 2), (0, 3)):
        t = psi.reshape(2, 2, 2, 2)
        rest = tuple(i for i in range(4) if i not in axes)
        mat = np.transpose(t, axes + rest).reshape(2 ** len(axes), -1)
        s = np.linalg.svd(mat, compute_uv=False)
        assert np.sum(s > 1e-12) == 2


def test_ghsz_constraints_have_zero_probability():
    psi, system = ghsz_correlations()
    assert system.exclusions
    from functools import reduce

    for ex in system.exclusions:
        factors = [
            o.projector if b == 1 else identity(2) - o.projector
            for o, b in zip(ex.observables, ex.forbidden_outcome)
        ]
        assert probability(reduce(tensor, factors), psi) <= 1e-12


def test_ghsz_mentions_all_eight_observables():
    _, system = ghsz_correlations()
    assert len(system.observables) == 8
    mentioned = {o.key() for ex in system.exclusions for o in ex.observables}
    assert mentioned == {o.key() for o in system.observables}
    # the distinguished observable: spin of party 1 along (1, 0, 0)
    n0 = system.observables[0]
    assert np.allclose(n0.direction.unit_vector(), [1.0, 0.0, 0.0], atol=1e-12)


def test_lhv_search_ghsz_is_empty():
    _, system = ghsz_correlations()
    assert lhv_search(system) == []


def test_lhv_search_product_state_has_models():
    plus_x = np.array([1, 1], dtype=complex) / math.sqrt(2)
    psi = plus_x
    for _ in range(3):
        psi = np.kron(psi, plus_x)
    half_pi = math.pi / 2
    settings = {
        p: (
            observable_from_direction(Direction(half_pi, 0.0), p, 4),
            observable_from_direction(Direction(half_pi, half_pi), p, 4),
        )
        for p in (1, 2, 3, 4)
    }
    exclusions = exclusions_from_state(psi, settings)
    assert exclusions
    system = ConstraintSystem(
        tuple(o for p in (1, 2, 3, 4) for o in settings[p]), (), exclusions
    )
    assert lhv_search(system)


def test_lhv_search_unconstrained():
    obs = tuple(
        observable_from_direction(Direction(0.3 * (i + 1), 0.0), i + 1, 4)
        for i in range(3)
    )
    system = ConstraintSystem(obs, (), ())
    assert len(lhv_search(system)) == 8


def test_lhv_search_refuses_large_systems():
    obs = tuple(
        observable_from_direction(Direction(0.05 * (i + 1), 0.0), 1 + i % 2, 2)
        for i in range(25)
    )
    with pytest.raises(ValueError, match="sampling"):
        lhv_search(ConstraintSystem(obs, (), ()))


def test_ghsz_contradiction_with_replayable_trace():
    _, system = ghsz_correlations()
    n0 = system.observables[0]
    contradiction = derive_contradiction(system, n0)
    assert contradiction is not None
    assert contradiction.observable == n0
    assert len(contradiction.derived_correlations) == 2
    assert replay_trace(system, contradiction)


def test_hardy_correlations_alone_yield_no_contradiction():
    cfg, cs = hardy_set()
    assert derive_contradiction(cs, cfg.observables()[0]) is None


def test_single_correlation_no_contradiction():
    s = observable_from_direction(Direction(0.4, 0.1), 1, 2)
    t = observable_from_direction(Direction(1.1, 0.7), 2, 2)
    cs = CorrelationSet.closure([Correlation(s, t)])
    assert derive_contradiction(cs, s) is None


def test_two_particle_sets_never_contradict(rng):
    checked = 0
    while checked < 60:
        chain, psi = random_chain(rng.integers(3, 6), rng)
        head = chain.observables[0]
        head_norm = np.linalg.norm(head.matrix @ psi)
        if head_norm < 1e-2 or head_norm > 1 - 1e-2:
            continue
        cs = CorrelationSet.closure(chain.links())
        assert derive_contradiction(cs, head) is None
        checked += 1


def test_exclusion_constraint_validation():
    o1 = observable_from_direction(Direction(0.1, 0.0), 1, 4)
    with pytest.raises(ValueError, match="distinct parties"):
        ExclusionConstraint((o1, o1), (0, 1))
