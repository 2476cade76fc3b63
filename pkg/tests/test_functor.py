import random

import pytest
from hypothesis import given, settings, strategies as st

from lcqft.algebra import Observable, commutator, multiply, phase_space, smeared_field
from lcqft.errors import NotAdmissible, WrongComponentCount
from lcqft.functor import (generator_map, is_isotone, morphism_action, pairing_preserved,
                           scalar_value, tensor_join, tensor_split, timeslice_reduce,
                           timeslice_reduce_literal)
from lcqft.green import TestFunction, causal_propagate
from lcqft.lattice import (AdmissibleEmbedding, CauchySlab, LatticeSpacetime, diamond,
                           glue_embeddings, injections, slab)
from lcqft.suites import random_embeddings, random_observable, random_spacetime

seeds = st.integers(0, 2 ** 31 - 1)


@settings(max_examples=15)
@given(seeds)
def test_functoriality_on_random_embeddings(seed):
    rng = random.Random(seed)
    M = random_spacetime(rng, 80)
    fam = random_embeddings(rng, M)
    for chi, after in fam.pairs:
        A = random_observable(rng, chi.source)
        assert morphism_action(chi.then(after), A) == \
            morphism_action(after, morphism_action(chi, A))
    ident = AdmissibleEmbedding.identity(M)
    A = random_observable(rng, M)
    assert morphism_action(ident, A) == A


@settings(max_examples=15)
@given(seeds)
def test_embeddings_are_isotone_and_symplectic(seed):
    rng = random.Random(seed)
    M = random_spacetime(rng, 80)
    for chi in random_embeddings(rng, M).embeddings:
        assert is_isotone(chi) and pairing_preserved(chi)


@settings(max_examples=15)
@given(seeds)
def test_morphisms_are_homomorphisms(seed):
    rng = random.Random(seed)
    M = random_spacetime(rng, 60)
    _, chi = slab(M, 0, M.n_t - 2)
    a, b = random_observable(rng, chi.source), random_observable(rng, chi.source)
    assert morphism_action(chi, multiply(a, b)) == \
        multiply(morphism_action(chi, a), morphism_action(chi, b))
    assert morphism_action(chi, a.adjoint()) == morphism_action(chi, a).adjoint()


def test_inadmissible_embedding_has_no_action():
    M = LatticeSpacetime.lattice(3, 4)
    flipped = AdmissibleEmbedding(M, M, tuple((c, 2 - t, x) for c, t, x in M.sites))
    with pytest.raises(NotAdmissible):
        generator_map(flipped)


@st.composite
def slab_cases(draw):
    n_t, n_x = draw(st.integers(3, 8)), draw(st.integers(3, 6))
    M = LatticeSpacetime.lattice(n_t, n_x, draw(st.sampled_from([1, "1/2"])),
                                 draw(st.sampled_from([0, 1, 2])))
    lo = draw(st.integers(0, n_t - 2))
    hi = draw(st.integers(lo + 1, n_t - 1))
    vals = draw(st.lists(st.integers(-3, 3), min_size=len(M.sites), max_size=len(M.sites)))
    return M, CauchySlab(M, lo, hi), TestFunction(M, tuple(vals))


@given(slab_cases())
def test_timeslice_reduction(case):
    M, s, f = case
    g = timeslice_reduce(M, f, s)
    assert causal_propagate(M, g) == causal_propagate(M, f)
    assert all(t in (s.t_low, s.t_low + 1) for _, t, _ in g.support())
    assert smeared_field(M, g) == smeared_field(M, f)


@given(slab_cases())
def test_timeslice_matches_commutator_form(case):
    M, s, f = case
    assert timeslice_reduce_literal(M, f, s) == timeslice_reduce(M, f, s)


def _spacelike_pair():
    M = LatticeSpacetime.lattice(5, 10, 1, 1)
    _, a = diamond(M, (1, 1), (3, 1))
    _, b = diamond(M, (1, 6), (3, 6))
    return M, a, b


def test_tensor_structure_and_causality():
    M, a, b = _spacelike_pair()
    rng = random.Random(4)
    A, B = random_observable(rng, a.source), random_observable(rng, b.source)
    chi = glue_embeddings(a, b)
    i1, i2 = injections(a.source, b.source)
    U = chi.source
    left, right = morphism_action(i1, A), morphism_action(i2, B)
    assert commutator(left, right).is_zero()
    assert commutator(morphism_action(a, A), morphism_action(b, B)).is_zero()
    assert morphism_action(chi, left) == morphism_action(a, A)
    split = tensor_split(U, multiply(left, right))
    assert split.cross_pairing_vanishes
    assert tensor_join(split) == multiply(left, right)


def test_tensor_split_needs_two_components():
    M = LatticeSpacetime.lattice(3, 4)
    with pytest.raises(WrongComponentCount):
        tensor_split(M, Observable.unit(phase_space(M)))


def test_empty_spacetime_gives_scalars():
    E = LatticeSpacetime.empty()
    sp = phase_space(E)
    assert sp.dim == 0
    assert scalar_value(multiply(Observable.unit(sp, 2), Observable.unit(sp, 5))) == 10
