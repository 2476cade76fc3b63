from fractions import Fraction

from hypothesis import given, strategies as st

from lcqft.algebra import Observable, commutator, multiply, phase_space, smeared_field
from lcqft.exact import I, Qi
from lcqft.green import TestFunction, apply_kg, green_operators
from lcqft.lattice import LatticeSpacetime, diamond, disjoint_union

M = LatticeSpacetime.lattice(5, 4, [[1, "1/2", 1, 2]] * 5, "1/2")
SP = phase_space(M)


def tf(M):
    n = len(M.sites)
    return st.dictionaries(st.integers(0, n - 1), st.integers(-3, 3), max_size=3).map(
        lambda d: TestFunction(M, tuple(Fraction(d.get(i, 0)) for i in range(n))))


@st.composite
def observables(draw, M=M, max_terms=3):
    sp = phase_space(M)
    out = Observable.unit(sp, draw(st.integers(-2, 2)))
    for _ in range(draw(st.integers(0, max_terms))):
        mono = Observable.unit(sp, Qi(draw(st.integers(-2, 2)), draw(st.integers(-1, 1))))
        for _ in range(draw(st.integers(1, 2))):
            mono = multiply(mono, smeared_field(M, draw(tf(M))))
        out = out + mono
    return out


@given(tf(M), tf(M))
def test_ccr(f, g):
    lhs = commutator(smeared_field(M, f), smeared_field(M, g))
    assert lhs == Observable.unit(SP, I * green_operators(M).pairing(f, g))


@given(tf(M), tf(M), st.integers(-3, 3))
def test_field_is_linear(f, g, a):
    assert smeared_field(M, f + g * a) == smeared_field(M, f) + smeared_field(M, g).scale(a)


@given(observables(), observables(), observables())
def test_product_is_associative(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@given(observables(), observables(), observables())
def test_jacobi(a, b, c):
    total = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
             + commutator(c, commutator(a, b)))
    assert total.is_zero()


@given(observables(), observables())
def test_adjoint_is_antimultiplicative_involution(a, b):
    assert a.adjoint().adjoint() == a
    assert multiply(a, b).adjoint() == multiply(b.adjoint(), a.adjoint())


def test_field_equation_ideal():
    for t in range(1, M.n_t - 1):
        for x in range(M.n_x):
            assert smeared_field(M, apply_kg(M, TestFunction.delta(M, (t, x)))).is_zero()


def test_canonical_coordinates_of_a_delta():
    N = LatticeSpacetime.lattice(4, 6)
    sp = phase_space(N)
    coords = sp.canonical(TestFunction.delta(N, (0, 0)))
    assert [i for i, v in enumerate(coords) if v] == [6] and coords[6] == 1
    assert sp.S[0][6] == -1
    assert sp.dim == 12


def test_preimages_and_symplectic_matrix():
    for i in range(SP.dim):
        e = SP.canonical(SP.preimage(i))
        assert e == tuple(1 if j == i else 0 for j in range(SP.dim))
    G = green_operators(M)
    for i in range(SP.dim):
        for j in range(SP.dim):
            assert SP.S[i][j] == G.pairing(SP.preimage(i), SP.preimage(j)) == -SP.S[j][i]


def test_masked_and_multi_component_spaces():
    D, _ = diamond(M, (0, 1), (4, 1))
    sp = phase_space(D)
    assert 0 < sp.dim < len(D.sites)
    U = disjoint_union(M, D)
    su = phase_space(U)
    assert su.dim == SP.dim + sp.dim
    assert all(su.S[i][j] == 0 for i in range(SP.dim) for j in range(SP.dim, su.dim))


def test_unit_and_scalars():
    one = Observable.unit(SP)
    a = smeared_field(M, TestFunction.delta(M, (2, 2)))
    assert multiply(one, a) == a == multiply(a, one)
    assert one.is_scalar() and not a.is_scalar() and a.degree() == 1
