import pytest
from hypothesis import given, strategies as st

from lcqft.errors import (CausallyRelatedImages, InvalidSpacetime, SiteError, SlabTooThin)
from lcqft.lattice import (AdmissibleEmbedding, CauchySlab, LatticeSpacetime, diamond,
                           disjoint_union, glue_embeddings, injections, is_admissible, slab,
                           translate)

from oracles import path_precedes

sizes = st.tuples(st.integers(3, 7), st.integers(3, 8))


@given(sizes, st.data())
def test_causal_order_matches_path_enumeration(size, data):
    M = LatticeSpacetime.lattice(*size)
    comp = M.single
    p = data.draw(st.sampled_from(comp.sites))
    r = data.draw(st.sampled_from(comp.sites))
    assert comp.precedes(p, r) == path_precedes(comp, p, r)


@given(sizes, st.data())
def test_causal_order_is_a_partial_order(size, data):
    M = LatticeSpacetime.lattice(*size)
    a, b, c = (data.draw(st.sampled_from(M.sites)) for _ in range(3))
    assert M.precedes(a, a)
    if M.precedes(a, b) and M.precedes(b, a):
        assert a == b
    if M.precedes(a, b) and M.precedes(b, c):
        assert M.precedes(a, c)


def test_site_errors():
    M = LatticeSpacetime.lattice(3, 4)
    assert M.site((1, 2)) == (0, 1, 2)
    with pytest.raises(SiteError):
        M.site((3, 0))
    U = disjoint_union(M, M)
    with pytest.raises(SiteError):
        U.site((0, 0))


def test_identity_slab_and_diamond_are_admissible():
    M = LatticeSpacetime.lattice(6, 7, 1, "1/2")
    assert is_admissible(AdmissibleEmbedding.identity(M))
    N, chi = slab(M, 1, 4)
    assert N.n_t == 4 and is_admissible(chi)
    D, chi = diamond(M, (0, 3), (4, 3))
    assert is_admissible(chi)
    assert len(D.sites) == 1 + 3 + 5 + 3 + 1


def test_translation_needs_invariant_coefficients():
    M = LatticeSpacetime.lattice(4, 5, 1, 1)
    assert is_admissible(translate(M, 2))
    bumpy = LatticeSpacetime.lattice(4, 5, 1, [[0, 1, 0, 0, 0]] * 4)
    rep = is_admissible(translate(bumpy, 2))
    assert not rep and rep.clause == "isometry"


def test_time_reversal_is_rejected():
    M = LatticeSpacetime.lattice(3, 4)
    flipped = AdmissibleEmbedding(M, M, tuple((c, 2 - t, x) for c, t, x in M.sites))
    assert not is_admissible(flipped)


def test_reflection_breaks_cyclic_orientation():
    M = LatticeSpacetime.lattice(3, 5)
    mirror = AdmissibleEmbedding(M, M, tuple((c, t, (-x) % 5) for c, t, x in M.sites))
    rep = is_admissible(mirror)
    assert not rep and rep.clause == "orientation"


def test_non_convex_image_is_rejected():
    M = LatticeSpacetime.lattice(5, 6)
    src = LatticeSpacetime.lattice(3, 6)
    # rows 0, 1, 3: paths from row 1 to row 3 pass through the missing row 2
    rows = {0: 0, 1: 1, 2: 3}
    chi = AdmissibleEmbedding(src, M, tuple((0, rows[t], x) for _, t, x in src.sites))
    assert not is_admissible(chi)


def test_glue_requires_spacelike_images():
    M = LatticeSpacetime.lattice(5, 10)
    _, a = diamond(M, (0, 1), (2, 1))
    _, b = diamond(M, (0, 6), (2, 6))
    _, c = diamond(M, (2, 2), (4, 2))
    chi = glue_embeddings(a, b)
    assert is_admissible(chi)
    with pytest.raises(CausallyRelatedImages):
        glue_embeddings(a, c)


def test_injections_and_empty_unit():
    M = LatticeSpacetime.lattice(3, 4)
    E = LatticeSpacetime.empty()
    assert disjoint_union(M, E) == M == disjoint_union(E, M)
    i1, i2 = injections(M, M)
    assert is_admissible(i1) and is_admissible(i2)
    assert not i1.image & i2.image


@given(sizes, st.data())
def test_composition_of_slabs(size, data):
    n_t, n_x = size
    M = LatticeSpacetime.lattice(n_t + 2, n_x)
    lo = data.draw(st.integers(0, n_t - 1))
    N, chi = slab(M, lo, n_t + 1)
    N2, chi2 = slab(N, 0, N.n_t - 1)
    assert is_admissible(chi2.then(chi))
    assert chi2.then(chi).images == chi.images


def test_cauchy_slab_validation_and_surface():
    M = LatticeSpacetime.lattice(6, 4)
    with pytest.raises(SlabTooThin):
        CauchySlab(M, 2, 2)
    with pytest.raises(InvalidSpacetime):
        CauchySlab(M, 4, 6)
    s = CauchySlab(M, 2, 3)
    assert s.contains_cauchy_surface()
    assert s.neighbourhood(5).rows == range(0, 6)


def test_json_round_trip():
    M = LatticeSpacetime.lattice(3, 4, [[1, "1/2", 1, 1]] * 3, 2)
    assert LatticeSpacetime.from_json(M.to_json()) == M
    with pytest.raises(InvalidSpacetime):
        LatticeSpacetime.from_json({"n_t": 3})
