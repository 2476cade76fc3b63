from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lcqft import kernels
from lcqft.green import (TestFunction, apply_kg, causal_propagate, green_operators,
                         green_operators_float)
from lcqft.kernels import _fallback
from lcqft.lattice import LatticeSpacetime, diamond

from oracles import dense_green, wronskian

coef = st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(2)])
mass = st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3)])


@st.composite
def spacetimes(draw, max_t=6, max_x=6):
    n_t = draw(st.integers(3, max_t))
    n_x = draw(st.integers(3, max_x))
    c = [[draw(coef) for _ in range(n_x)] for _ in range(n_t)]
    m = [[draw(mass) for _ in range(n_x)] for _ in range(n_t)]
    return LatticeSpacetime.lattice(n_t, n_x, c, m)


def functions(M):
    return st.lists(st.integers(-3, 3), min_size=len(M.sites), max_size=len(M.sites)).map(
        lambda v: TestFunction(M, tuple(Fraction(x) for x in v)))


@given(spacetimes())
def test_exact_green_matches_dense_solve(M):
    G = green_operators(M)
    R, A = dense_green(M)
    assert np.allclose(np.array(G.E_ret, dtype=float), R, atol=1e-9 * max(1, np.abs(R).max()))
    assert np.allclose(np.array(G.E_adv, dtype=float), A, atol=1e-9 * max(1, np.abs(A).max()))


@given(spacetimes(), st.data())
def test_pairing_is_conserved_wronskian(M, data):
    f, g = data.draw(functions(M)), data.draw(functions(M))
    u, v = causal_propagate(M, f), causal_propagate(M, g)
    pair = green_operators(M).pairing(f, g)
    for t in range(M.n_t - 1):
        assert wronskian(u, v, t, M.n_x) == pair


@given(spacetimes(), st.data())
def test_E_is_antisymmetric_and_causal(M, data):
    G = green_operators(M)
    sites = M.sites
    i = data.draw(st.integers(0, len(sites) - 1))
    for j in range(len(sites)):
        assert G.E[i][j] == -G.E[j][i]
        if G.E_ret[i][j]:
            assert M.precedes(sites[j], sites[i])
        if not M.causally_related(sites[i], sites[j]):
            assert G.E[i][j] == 0


@given(spacetimes(), st.data())
def test_causal_propagate_is_E(M, data):
    f = data.draw(functions(M))
    assert causal_propagate(M, f) == green_operators(M).causal(f)


def test_E_annihilates_interior_P():
    M = LatticeSpacetime.lattice(6, 5, 1, "1/2")
    for t in range(1, 5):
        g = TestFunction.delta(M, (t, 2))
        assert causal_propagate(M, apply_kg(M, g)).is_zero()
    # a row-0 source leaks through the boundary
    assert not causal_propagate(M, apply_kg(M, TestFunction.delta(M, (0, 2)))).is_zero()


def test_masked_component_green():
    M = LatticeSpacetime.lattice(5, 7, 1, 1)
    D, _ = diamond(M, (0, 3), (4, 3))
    G = green_operators(D)
    sites = D.sites
    for i, p in enumerate(sites):
        for j, r in enumerate(sites):
            if not D.causally_related(p, r):
                assert G.E[i][j] == 0


@given(spacetimes(max_t=8, max_x=8))
def test_float_kernel_agrees_with_exact(M):
    R, A, E = green_operators_float(M)
    G = green_operators(M)
    scale = max(1.0, float(np.abs(np.array(G.E, dtype=float)).max()))
    assert np.abs(E - np.array(G.E, dtype=float)).max() <= 1e-9 * scale


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="extension not built")
@given(spacetimes(max_t=8, max_x=8), st.integers(0, 2 ** 32 - 1))
def test_compiled_kernel_matches_fallback(M, seed):
    from lcqft.kernels import _stepping
    from lcqft.green import _float_arrays
    c, m, mask = _float_arrays(M.single)
    src = np.random.default_rng(seed).normal(size=(3, M.n_t, M.n_x))
    for name in ("step_retarded", "step_advanced"):
        a = getattr(_stepping, name)(c, m, mask, src)
        b = getattr(_fallback, name)(c, m, mask, src)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_backend_is_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_test_function_algebra():
    M = LatticeSpacetime.lattice(3, 3)
    f = TestFunction.delta(M, (1, 1), 2)
    g = TestFunction.from_mapping(M, {(1, 1): -2, (0, 0): 1})
    assert (f + g).support() == {(0, 0, 0)}
    assert (f - f).is_zero() and (f * 3)[(1, 1)] == 6
    assert f.pairing(g) == -4
