import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lcqft.errors import ConfigParse
from lcqft.exact import inverse
from lcqft.fields import (CallableField, FieldCategory, FixedSiteField, TemplateField,
                          TemplateTerm, check_naturality, density_field, exact_fixture_theta,
                          field_brst, field_cohomology_probe, field_product, unit_field)
from lcqft.green import TestFunction, kg_matrix

CAT = FieldCategory.default()
OBJS = list(CAT.objects.values())
offset = st.tuples(st.integers(-1, 1), st.integers(-1, 1))


@st.composite
def templates(draw, ghost=None):
    n_phid = draw(st.integers(0, 1))
    has_c = draw(st.booleans()) if ghost is None else False
    terms = []
    for _ in range(draw(st.integers(1, 2))):
        terms.append(TemplateTerm(Fraction(draw(st.integers(-3, 3)) or 1),
                                  tuple(draw(st.lists(offset, max_size=2))),
                                  tuple(draw(st.lists(offset, min_size=n_phid, max_size=n_phid))),
                                  has_c))
    return TemplateField(terms, "t")


def deltas(obj):
    return [TestFunction.delta(obj.spacetime, s) for s in obj.spacetime.sites]


def sample_pairs(rng, obj, k=5):
    ds = deltas(obj)
    return [(rng.choice(ds), rng.choice(ds)) for _ in range(k)]


@settings(max_examples=25)
@given(templates())
def test_s_squared_vanishes(phi):
    ss = field_brst(field_brst(phi))
    for obj in OBJS:
        for f in deltas(obj):
            assert ss(obj, f).is_zero()


@settings(max_examples=25)
@given(templates(), templates(), st.integers(0, 1000))
def test_leibniz(a, b, seed):
    rng = random.Random(seed)
    lhs = field_brst(field_product(a, b))
    r1, r2 = field_product(field_brst(a), b), field_product(a, field_brst(b))
    sign = -1 if a.parity else 1
    for obj in OBJS:
        for f, g in sample_pairs(rng, obj):
            assert lhs(obj, f, g) == r1(obj, f, g) + r2(obj, f, g).scale(sign)


@settings(max_examples=15)
@given(templates())
def test_templates_and_their_differentials_are_natural(phi):
    assert check_naturality(phi, CAT, limit=30)
    assert check_naturality(field_brst(phi), CAT, limit=30)


@settings(max_examples=15)
@given(templates(ghost=0), templates(ghost=0), st.integers(0, 1000))
def test_products_without_ghost_terms_are_graded_commutative(a, b, seed):
    rng = random.Random(seed)
    ab, ba = field_product(a, b), field_product(b, a)
    sign = -1 if a.parity and b.parity else 1
    for obj in OBJS:
        for f, g in sample_pairs(rng, obj):
            assert ab(obj, f, g) == ba(obj, f, g).scale(sign)
    assert check_naturality(ab, CAT, limit=30)


def test_twisted_ghost_breaks_commutativity():
    # c u = (-1)^|u| tau(u) c, so phi * (phi c) and (phi c) * phi differ
    phi = TemplateField([TemplateTerm(Fraction(1), ((0, 0),))])
    phic = TemplateField([TemplateTerm(Fraction(1), ((0, 0),), (), True)])
    obj = CAT.objects["A"]
    f = g = TestFunction.delta(obj.spacetime, (1, 1))
    a, b = phi(obj, f), phic(obj, g)
    assert a * b != (b * a).scale(-1 if phi.parity and phic.parity else 1)


def test_fixed_site_field_is_not_natural():
    rep = check_naturality(FixedSiteField(), CAT)
    assert not rep
    assert rep.morphism is not None and rep.sites


def test_probe_classification():
    cands = [unit_field(), density_field(), FixedSiteField(), field_brst(exact_fixture_theta())]
    got = {c.name: (c.natural, c.closed, c.exact) for c in field_cohomology_probe(CAT, cands)}
    assert got["unit"] == (True, True, False)
    assert got["density"] == (True, True, False)
    assert got["fixed-site"][0] is False
    assert got["s(theta)"] == (True, True, True)


def test_density_is_exact_with_a_nonlocal_primitive():
    # P is invertible on a finite lattice, so Theta(f) = sum f(x) P^-1(x, y) phi(x) phi‡(y)
    # is a natural primitive; non-exactness only holds for local ansatz fields
    inv = {}

    def theta(obj, f):
        M = obj.spacetime
        Pi = inv.setdefault(obj.name, inverse(kg_matrix(M)))
        out = obj.zero()
        for i, (s, v) in enumerate(zip(M.sites, f.values)):
            if v:
                for j, r in enumerate(M.sites):
                    if Pi[i][j]:
                        out = out + obj.lift(obj.phi(s) * obj.phid(r)).scale(v * Pi[i][j])
        return out

    T = CallableField(1, -1, theta, "nonlocal")
    assert check_naturality(T, CAT)
    sT, dens = field_brst(T), density_field()
    for obj in OBJS:
        for f in deltas(obj):
            assert sT(obj, f) == dens(obj, f)


def test_category_structure():
    assert not CAT.gauge_violations()
    names = {m.name for m in CAT.morphisms}
    assert {"U.inj0", "U.inj1", "U.shift1", "A.shift1", "B.shift4"} <= names
    with pytest.raises(ConfigParse):
        FieldCategory.from_json({"objects": {"A": {}}})
