import random

import pytest
from hypothesis import given, strategies as st

from lcqft import bv
from lcqft.bv import GradedElement as G
from lcqft.errors import ConfigParse, TruncationError

from oracles import invariant_quotient_dimension

SO3 = bv.so3_model()
AB = bv.abelian_model()
HAT = bv.trivial_model(2, bv.mexican_hat(2))
MODELS = [SO3, AB, HAT]
seeds = st.integers(0, 2 ** 31 - 1)


def test_models_are_consistent():
    for m in MODELS:
        assert not any(m.diagnostics().values()), m.name


def test_chevalley_eilenberg_on_generators():
    assert bv.apply_gamma(G.c(SO3, 0)) == (G.c(SO3, 1) * G.c(SO3, 2)).scale(-1)
    expected = (G.x(SO3, 2) * G.c(SO3, 1)).scale(-1) + G.x(SO3, 1) * G.c(SO3, 2)
    assert bv.apply_gamma(G.x(SO3, 0)) == expected


def test_koszul_tate_on_antifields():
    for i in range(3):
        grad = bv.poly_diff(SO3.S, i)
        assert bv.apply_delta(G.xd(SO3, i)) == G.poly(SO3, grad)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
@given(seed=seeds)
def test_nilpotency(model, seed):
    rng = random.Random(seed)
    u = bv.random_element(model, rng)
    d, g, s = bv.apply_delta, bv.apply_gamma, bv.apply_s
    assert d(d(u)).is_zero()
    assert g(g(u)).is_zero()
    assert (d(g(u)) + g(d(u))).is_zero()
    assert s(s(u)).is_zero()


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.name)
@given(seed=seeds)
def test_leibniz_and_ghost_number(model, seed):
    rng = random.Random(seed)
    u, v = bv.random_element(model, rng), bv.random_element(model, rng)
    for p in (0, 1):
        up = G(model, {k: c for k, c in u.terms.items() if bv.key_parity(k) == p})
        sign = -1 if p else 1
        assert bv.apply_s(up * v) == bv.apply_s(up) * v + (up * bv.apply_s(v)).scale(sign)
    for gh in u.ghost_numbers():
        img = bv.apply_s(u.ghost_component(gh))
        assert img.ghost_numbers() <= {gh + 1}


@given(seeds)
def test_graded_commutativity(seed):
    rng = random.Random(seed)
    u, v = bv.random_element(SO3, rng), bv.random_element(SO3, rng)
    for p in (0, 1):
        for r in (0, 1):
            a = G(SO3, {k: c for k, c in u.terms.items() if bv.key_parity(k) == p})
            b = G(SO3, {k: c for k, c in v.terms.items() if bv.key_parity(k) == r})
            assert a * b == (b * a).scale(-1 if p and r else 1)


def test_sabotage_is_detected():
    m = bv.sabotage_model()
    assert [a for a, _ in m.invariance_violations()] == [1, 2]
    rep = bv.check_nilpotency(m, [])
    assert not rep.ok and rep.invariance == (1, 2)
    assert "not invariant" in rep.summary()


def test_so3_cohomology_matches_invariant_theory():
    res = bv.cohomology(SO3, 0, 2)
    assert res.dimension == invariant_quotient_dimension(SO3, 2) == 2
    assert bv.cohomology(SO3, 0, 2, preimage_degree=4).dimension == 2


@pytest.mark.slow
def test_so3_cohomology_degree_three():
    assert bv.cohomology(SO3, 0, 3).dimension == invariant_quotient_dimension(SO3, 3)


def test_unconstrained_models_match_invariant_theory():
    for m, d in ((bv.trivial_model(1), 1), (bv.trivial_model(1), 2), (HAT, 2)):
        assert bv.cohomology(m, 0, d).dimension == invariant_quotient_dimension(m, d)


def test_abelian_model_has_extra_koszul_tate_classes():
    res = bv.cohomology(AB, 0, 2)
    assert res.dimension == 5
    assert bv.cohomology(AB, 0, 2, preimage_degree=4).dimension == 5
    ghost_free = [r for r in res.representatives
                  if all(not k[0] and not k[2] and not k[3] for k in r.terms)]
    assert len(ghost_free) == invariant_quotient_dimension(AB, 2) == 2


def test_cohomology_edge_cases():
    assert bv.cohomology(bv.trivial_model(2), -5, 2).dimension == 0
    with pytest.raises(TruncationError):
        bv.cohomology(SO3, 0, -1)


def test_so3_negative_ghost_classes_stabilise():
    # dS = (|x|^2 - 1) x is not a regular sequence, so Koszul-Tate homology survives
    assert [bv.cohomology(SO3, -1, 2, preimage_degree=p).dimension for p in (3, 4)] == [2, 2]
    assert bv.cohomology(SO3, -2, 2).dimension == 1


def test_json_round_trip_and_errors():
    for m in MODELS + [bv.sabotage_model()]:
        back = bv.GaugeModel.from_json(m.to_json())
        assert back.S == m.S and back.fields == m.fields
    with pytest.raises(ConfigParse):
        bv.GaugeModel.from_json({"config_dim": 2})


def test_broken_structure_constants_are_reported():
    doc = SO3.to_json()
    doc["structure_constants"] = [[0, 1, 2, "1"]]
    m = bv.GaugeModel.from_json(doc)
    diag = m.diagnostics()
    assert any(diag.values())
