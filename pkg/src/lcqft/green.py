"""Test functions, the discrete Klein-Gordon operator and its Green operators.

The operator on a component is

    (P phi)(t, x) = phi(t+1, x) - 2 phi(t, x) + phi(t-1, x)
                    - [c(t, x) (phi(t, x+1) - phi(t, x)) - c(t, x-1) (phi(t, x) - phi(t, x-1))]
                    + m(t, x) phi(t, x)

with ``phi = 0`` off the lattice (and off the mask).  With a uniform coupling
this is the textbook stencil; the edge form keeps ``P`` symmetric for any
coupling field.

The retarded operator is built by stepping forward from each source, the
advanced one by stepping backward.  On a finite time range ``P E_ret f = f``
holds on every row except the last (the solution leaves the lattice through
it) and ``P E_adv f = f`` on every row except the first.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import kernels
from .errors import SpacetimeMismatch
from .exact import Number, q
from .lattice import AdmissibleEmbedding, Component, LatticeSpacetime, Site


@dataclass(frozen=True)
class TestFunction:
    """A rational function on the sites of a spacetime (``values`` follows ``spacetime.sites``)."""

    __test__ = False  # keep pytest from collecting this class

    spacetime: LatticeSpacetime
    values: tuple

    def __post_init__(self):
        vals = tuple(q(v) for v in self.values)
        if len(vals) != len(self.spacetime.sites):
            raise SpacetimeMismatch("values do not match the number of sites")
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls, M: LatticeSpacetime) -> "TestFunction":
        return cls(M, (0,) * len(M.sites))

    @classmethod
    def delta(cls, M: LatticeSpacetime, p, weight: Number = 1) -> "TestFunction":
        vals = [0] * len(M.sites)
        vals[M.index[M.site(p)]] = weight
        return cls(M, tuple(vals))

    @classmethod
    def from_mapping(cls, M: LatticeSpacetime, values: Mapping) -> "TestFunction":
        vals = [0] * len(M.sites)
        for p, v in values.items():
            vals[M.index[M.site(p)]] = v
        return cls(M, tuple(vals))

    def __getitem__(self, p) -> Number:
        return self.values[self.spacetime.index[self.spacetime.site(p)]]

    def _check(self, other: "TestFunction"):
        if other.spacetime != self.spacetime:
            raise SpacetimeMismatch("test functions live on different spacetimes")

    def __add__(self, other: "TestFunction") -> "TestFunction":
        self._check(other)
        return TestFunction(self.spacetime, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "TestFunction") -> "TestFunction":
        self._check(other)
        return TestFunction(self.spacetime, tuple(a - b for a, b in zip(self.values, other.values)))

    def __neg__(self):
        return TestFunction(self.spacetime, tuple(-a for a in self.values))

    def __mul__(self, scalar) -> "TestFunction":
        s = q(scalar)
        return TestFunction(self.spacetime, tuple(s * a for a in self.values))

    __rmul__ = __mul__

    def support(self) -> frozenset[Site]:
        return frozenset(s for s, v in zip(self.spacetime.sites, self.values) if v != 0)

    def is_zero(self) -> bool:
        return not any(self.values)

    def pushforward(self, chi: AdmissibleEmbedding) -> "TestFunction":
        """Extension by zero along an embedding."""
        if chi.source != self.spacetime:
            raise SpacetimeMismatch("test function does not live on the embedding source")
        vals = [0] * len(chi.target.sites)
        for v, img in zip(self.values, chi.images):
            vals[chi.target.index[img]] = v
        return TestFunction(chi.target, tuple(vals))

    def pullback(self, chi: AdmissibleEmbedding) -> "TestFunction":
        """Restriction to the image of ``chi`` (values read back on the source)."""
        if chi.target != self.spacetime:
            raise SpacetimeMismatch("test function does not live on the embedding target")
        return TestFunction(chi.source, tuple(self[img] for img in chi.images))

    def reinterpret(self, M: LatticeSpacetime) -> "TestFunction":
        """Same values on a spacetime with the same sites but other coefficients."""
        if M.sites != self.spacetime.sites:
            raise SpacetimeMismatch("spacetimes do not share their site set")
        return TestFunction(M, self.values)

    def pairing(self, other: "TestFunction") -> Number:
        self._check(other)
        return q(sum((a * b for a, b in zip(self.values, other.values) if a and b), 0))

    def as_float(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])


def _grid_of(f: TestFunction, c: int) -> list[list[Number]]:
    comp = f.spacetime.components[c]
    grid = [[0] * comp.n_x for _ in range(comp.n_t)]
    idx = f.spacetime.index
    for t, x in comp.sites:
        grid[t][x] = f.values[idx[(c, t, x)]]
    return grid


def _laplacian(comp: Component, row: list, t: int, x: int) -> Number:
    n = comp.n_x
    cur = row[x]
    return (comp.coupling[t][x] * (row[(x + 1) % n] - cur)
            - comp.coupling[t][x - 1] * (cur - row[x - 1]))


def _kg_grid(comp: Component, phi: list[list]) -> list[list]:
    out = [[0] * comp.n_x for _ in range(comp.n_t)]
    for t, x in comp.sites:
        cur = phi[t][x]
        up = phi[t + 1][x] if t + 1 < comp.n_t else 0
        down = phi[t - 1][x] if t > 0 else 0
        out[t][x] = q(up - 2 * cur + down - _laplacian(comp, phi[t], t, x)
                      + comp.mass_sq[t][x] * cur)
    return out


def apply_kg(M: LatticeSpacetime, phi: TestFunction) -> TestFunction:
    """The discrete Klein-Gordon operator ``P`` on every component of ``M``."""
    if phi.spacetime != M:
        raise SpacetimeMismatch("test function does not live on M")
    vals = [0] * len(M.sites)
    for c, comp in enumerate(M.components):
        out = _kg_grid(comp, _grid_of(phi, c))
        for t, x in comp.sites:
            vals[M.index[(c, t, x)]] = out[t][x]
    return TestFunction(M, tuple(vals))


def _step(comp: Component, src: list[list], forward: bool) -> list[list]:
    """Exact retarded (``forward``) or advanced solution of ``P phi = src``."""
    n_t, n_x = comp.n_t, comp.n_x
    phi = [[0] * n_x for _ in range(n_t)]
    rows = range(n_t - 1) if forward else range(n_t - 1, 0, -1)
    for t in rows:
        new_t = t + 1 if forward else t - 1
        old_t = t - 1 if forward else t + 1
        cur_row = phi[t]
        old_row = phi[old_t] if 0 <= old_t < n_t else None
        new_row = phi[new_t]
        m_row = comp.mass_sq[t]
        s_row = src[t]
        for x in range(n_x):
            if not comp.contains(new_t, x):
                continue
            cur = cur_row[x]
            val = s_row[x] + 2 * cur + _laplacian(comp, cur_row, t, x) - m_row[x] * cur
            if old_row is not None:
                val -= old_row[x]
            new_row[x] = q(val)
    return phi


def _row_uniform(comp: Component) -> bool:
    return comp.is_full and all(len(set(r)) == 1 for r in comp.coupling) and \
        all(len(set(r)) == 1 for r in comp.mass_sq)


@dataclass(frozen=True)
class GreenOperators:
    """Exact retarded, advanced and causal propagators of one component.

    Matrices are indexed ``[p][q]`` with ``p`` the field point and ``q`` the
    source point, both in ``spacetime.sites`` order.
    """

    spacetime: LatticeSpacetime
    E_ret: tuple
    E_adv: tuple
    E: tuple

    def _apply(self, mat, f: TestFunction) -> TestFunction:
        if f.spacetime != self.spacetime:
            raise SpacetimeMismatch("test function does not live on this spacetime")
        nz = [(j, v) for j, v in enumerate(f.values) if v]
        return TestFunction(self.spacetime,
                            tuple(q(sum((row[j] * v for j, v in nz), 0)) for row in mat))

    def retarded(self, f: TestFunction) -> TestFunction:
        return self._apply(self.E_ret, f)

    def advanced(self, f: TestFunction) -> TestFunction:
        return self._apply(self.E_adv, f)

    def causal(self, f: TestFunction) -> TestFunction:
        return self._apply(self.E, f)

    def pairing(self, f: TestFunction, g: TestFunction) -> Number:
        """``<f, E g>``."""
        return f.pairing(self.causal(g))


def _green_matrix(comp: Component, forward: bool) -> list[list]:
    sites = comp.sites
    index = {s: i for i, s in enumerate(sites)}
    n = len(sites)
    mat = [[0] * n for _ in range(n)]
    uniform = _row_uniform(comp)
    cache: dict[int, list[list]] = {}
    for j, (s, y) in enumerate(sites):
        if uniform:
            if s not in cache:
                src = [[0] * comp.n_x for _ in range(comp.n_t)]
                src[s][0] = 1
                cache[s] = _step(comp, src, forward)
            base = cache[s]
            for (t, x), i in index.items():
                v = base[t][(x - y) % comp.n_x]
                if v:
                    mat[i][j] = v
        else:
            src = [[0] * comp.n_x for _ in range(comp.n_t)]
            src[s][y] = 1
            phi = _step(comp, src, forward)
            for (t, x), i in index.items():
                if phi[t][x]:
                    mat[i][j] = phi[t][x]
    return mat


@lru_cache(maxsize=256)
def green_operators(M: LatticeSpacetime) -> GreenOperators:
    """Exact Green operators of a single-component spacetime (cached per spacetime)."""
    comp = M.single
    ret = _green_matrix(comp, True)
    adv = _green_matrix(comp, False)
    E = tuple(tuple(q(a - b) for a, b in zip(r, s)) for r, s in zip(ret, adv))
    return GreenOperators(M, tuple(map(tuple, ret)), tuple(map(tuple, adv)), E)


def causal_propagate(M: LatticeSpacetime, f: TestFunction) -> TestFunction:
    """``E f`` on a possibly multi-component spacetime (componentwise)."""
    if f.spacetime != M:
        raise SpacetimeMismatch("test function does not live on M")
    vals = [0] * len(M.sites)
    for c in range(len(M.components)):
        comp = M.components[c]
        src = _grid_of(f, c)
        ret = _step(comp, src, True)
        adv = _step(comp, src, False)
        for t, x in comp.sites:
            vals[M.index[(c, t, x)]] = q(ret[t][x] - adv[t][x])
    return TestFunction(M, tuple(vals))


# --- float mode -------------------------------------------------------------

def _float_arrays(comp: Component):
    coupling = np.array([[float(v) for v in r] for r in comp.coupling])
    mass = np.array([[float(v) for v in r] for r in comp.mass_sq])
    mask = np.zeros((comp.n_t, comp.n_x), dtype=np.uint8)
    for t, x in comp.sites:
        mask[t, x] = 1
    return coupling, mass, mask


def causal_propagate_float(comp: Component, src: np.ndarray,
                           coupling: np.ndarray | None = None,
                           mass: np.ndarray | None = None) -> np.ndarray:
    """``E`` applied to a batch of source grids of shape ``(k, n_t, n_x)``.

    ``coupling``/``mass`` override the component coefficients (float mode
    perturbation sweeps use this to avoid rebuilding rational components).
    """
    c0, m0, mask = _float_arrays(comp)
    coupling = c0 if coupling is None else np.ascontiguousarray(coupling, dtype=np.float64)
    mass = m0 if mass is None else np.ascontiguousarray(mass, dtype=np.float64)
    src = np.ascontiguousarray(src, dtype=np.float64)
    return (kernels.step_retarded(coupling, mass, mask, src)
            - kernels.step_advanced(coupling, mass, mask, src))


def green_operators_float(M: LatticeSpacetime):
    """Float64 ``(E_ret, E_adv, E)`` matrices via the stepping kernel."""
    comp = M.single
    n = len(comp.sites)
    src = np.zeros((n, comp.n_t, comp.n_x))
    for j, (t, x) in enumerate(comp.sites):
        src[j, t, x] = 1.0
    coupling, mass, mask = _float_arrays(comp)
    ret = kernels.step_retarded(coupling, mass, mask, src)
    adv = kernels.step_advanced(coupling, mass, mask, src)
    rows = [t * comp.n_x + x for t, x in comp.sites]
    R = ret.reshape(n, -1)[:, rows].T.copy()
    A = adv.reshape(n, -1)[:, rows].T.copy()
    return R, A, R - A


def kg_matrix(M: LatticeSpacetime) -> list[list]:
    """``P`` as an exact matrix over ``M.sites`` (test helper, any component count)."""
    n = len(M.sites)
    cols = []
    for j in range(n):
        e = [0] * n
        e[j] = 1
        cols.append(apply_kg(M, TestFunction(M, tuple(e))).values)
    return [list(r) for r in zip(*cols)]
