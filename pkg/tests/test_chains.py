import math

import numpy as np
import pytest

from nonlocality_lab.chains import (
    Chain,
    ChainPreconditionError,
    CorrelationSet,
    lemma1_check,
    maximal_chain,
    party_at,
    prop2_verify,
    r2_derivable,
    random_chain,
    verify_chain,
)
from nonlocality_lab.correlation_engine import Correlation, dual
from nonlocality_lab.hardy import build_hardy, schmidt_state
from nonlocality_lab.spin_observables import Direction, embed, observable_from_direction

Z_UP = np.diag([1.0, 0.0])


def hardy_chain():
    cfg = build_hardy(schmidt_state(0.8), Direction(1.0, 0.0))
    return Chain(cfg.observables()), cfg


def test_party_index_function():
    assert [party_at(j) for j in range(6)] == [1, 2, 1, 2, 1, 2]


def test_chain_rejects_same_party_neighbors():
    a = observable_from_direction(Direction(0.4, 0.0), 1, 2)
    b = observable_from_direction(Direction(0.9, 0.0), 1, 2)
    with pytest.raises(ValueError, match="alternate"):
        Chain((a, b))


def test_verify_hardy_chain():
    chain, cfg = hardy_chain()
    assert verify_chain(chain, cfg.psi)


def test_verify_fails_with_perturbed_tail():
    chain, cfg = hardy_chain()
    perturbed = observable_from_direction(
        Direction(cfg.n4.theta + 1e-3, cfg.n4.phi), 2, 2
    )
    bad = Chain(chain.observables[:3] + (perturbed,))
    assert not verify_chain(bad, cfg.psi)


def test_length_two_chain_on_product_state():
    psi = np.array([1, 0, 0, 0], dtype=complex)
    chain = Chain((embed(Z_UP, 1, 2), embed(Z_UP, 2, 2)))
    assert verify_chain(chain, psi)


def test_lemma1_on_hardy_chain():
    chain, cfg = hardy_chain()
    assert lemma1_check(chain, cfg.psi)


def test_lemma1_sweep(rng):
    for _ in range(200):
        chain, psi = random_chain(4, rng)
        assert lemma1_check(chain, psi)


def test_lemma1_precondition_on_annihilated_head():
    psi = np.array([0, 0, 1, 0], dtype=complex)
    chain = Chain((embed(Z_UP, 1, 2), embed(Z_UP, 2, 2)))
    with pytest.raises(ChainPreconditionError, match="head"):
        lemma1_check(chain, psi)


def test_correlation_set_closure_is_dual_automorphism():
    _, cfg = hardy_chain()
    cs = CorrelationSet.closure(cfg.correlations())
    keys = {c.key() for c in cs.correlations}
    assert {dual(c).key() for c in cs.correlations} == keys


def test_correlation_set_rejects_unclosed():
    _, cfg = hardy_chain()
    c = cfg.correlations()[0]
    with pytest.raises(ValueError, match="not closed"):
        CorrelationSet((c.source, c.target), (c,))


def test_maximal_chain_recovers_hardy_chain():
    chain, cfg = hardy_chain()
    cs = CorrelationSet.closure(cfg.correlations())
    grown = maximal_chain(cs, chain.observables[0], cfg.psi)
    assert [o.key() for o in grown.observables] == [o.key() for o in chain.observables]


def test_maximal_chain_from_middle_grows_both_ways():
    chain, cfg = hardy_chain()
    cs = CorrelationSet.closure(cfg.correlations())
    grown = maximal_chain(cs, chain.observables[1], cfg.psi)
    assert len(grown) == 4


def test_maximal_chain_singleton():
    _, cfg = hardy_chain()
    isolated = observable_from_direction(Direction(0.3, 2.0), 1, 2)
    cs = CorrelationSet(
        tuple(list(CorrelationSet.closure(cfg.correlations()).observables) + [isolated]),
        CorrelationSet.closure(cfg.correlations()).correlations,
    )
    grown = maximal_chain(cs, isolated, cfg.psi)
    assert len(grown) == 1


def test_maximal_chain_does_not_cross_components(rng):
    chain, cfg = hardy_chain()
    # a disjoint correlation that also holds for psi, from the partner of a
    # fresh direction, must stay outside the grown chain
    from nonlocality_lab.correlation_engine import partner

    extra_src = observable_from_direction(Direction(2.2, 3.0), 1, 2)
    extra = Correlation(extra_src, partner(cfg.psi, extra_src))
    cs = CorrelationSet.closure(list(cfg.correlations()) + [extra])
    grown = maximal_chain(cs, chain.observables[0], cfg.psi)
    keys = {o.key() for o in grown.observables}
    assert extra_src.key() not in keys


def test_r2_derivable():
    chain, _ = hardy_chain()
    assert r2_derivable(chain, 1, 4)
    assert not r2_derivable(chain, 3, 2)
    assert r2_derivable(chain, 2, 2)
    with pytest.raises(ValueError):
        r2_derivable(chain, 0, 2)


def test_prop2_on_random_chains(rng):
    for k in (1, 2, 3):
        for _ in range(25):
            chain, _ = random_chain(2 * k + 1, rng)
            report = prop2_verify(chain, k)
            assert report.max_head_norm <= 1e-10
            assert report.head_annihilated


def test_prop2_impossible_equation_residual(rng):
    for _ in range(100):
        chain, _ = random_chain(3, rng)
        report = prop2_verify(chain, 1)
        assert abs(report.impossible_residual - math.sqrt(2)) < 1e-12


def test_prop2_cascade_structure():
    chain, _ = hardy_chain()
    report = prop2_verify(chain, 1)
    # for k=1 the cascade pairs positions (2, 2) and (3, 1)
    assert report.cascade == ((1, 2, 2), (2, 3, 1))


def test_prop2_two_link_contradiction(rng):
    # closing a 2-link chain forces the head out of every admissible state
    chain, psi = random_chain(3, rng)
    head = chain.observables[0]
    assert np.linalg.norm(head.matrix @ psi) > 1e-2
    report = prop2_verify(chain, 1)
    assert report.head_annihilated


def test_prop2_rejects_short_chain():
    chain, _ = hardy_chain()
    with pytest.raises(ValueError, match="too short"):
        prop2_verify(chain, 2)
