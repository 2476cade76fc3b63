"""The free-field functor: morphism action, timeslice reduction and tensor structure."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .algebra import Observable, apply_linear_map, multiply, phase_space, smeared_field
from .errors import SpacetimeMismatch, WrongComponentCount
from .exact import Number, q, rank
from .green import TestFunction, apply_kg, causal_propagate
from .lattice import (AdmissibleEmbedding, CauchySlab, LatticeSpacetime, injections,
                      require_admissible)

__all__ = [
    "generator_map", "morphism_action", "is_isotone", "pairing_preserved",
    "timeslice_reduce", "timeslice_reduce_literal", "TensorSplit", "tensor_split",
    "tensor_join", "scalar_value", "field",
]


@lru_cache(maxsize=1024)
def generator_map(chi: AdmissibleEmbedding) -> tuple[dict, ...]:
    """Images of the canonical generators of the source under ``alpha_chi``.

    Entry ``i`` maps target generator indices to coefficients.
    """
    require_admissible(chi)
    src, tgt = phase_space(chi.source), phase_space(chi.target)
    cols = []
    for i in range(src.dim):
        coords = tgt.canonical(src.preimage(i).pushforward(chi))
        cols.append({j: v for j, v in enumerate(coords) if v})
    return tuple(cols)


def morphism_action(chi: AdmissibleEmbedding, A: Observable) -> Observable:
    """``alpha_chi(A)``: push generators forward by extension by zero."""
    if A.spacetime != chi.source:
        raise SpacetimeMismatch("observable does not live on the source of the embedding")
    return apply_linear_map(A, generator_map(chi), phase_space(chi.target))


def is_isotone(chi: AdmissibleEmbedding) -> bool:
    """``alpha_chi`` is injective iff the generator images are independent."""
    cols = generator_map(chi)
    dim_t = phase_space(chi.target).dim
    rows = [[col.get(j, 0) for j in range(dim_t)] for col in cols]
    return rank(rows) == len(cols) if cols else True


def pairing_preserved(chi: AdmissibleEmbedding) -> bool:
    """``<chi_* f, E_M chi_* g> = <f, E_N g>`` on all pairs of generators."""
    src, tgt = phase_space(chi.source), phase_space(chi.target)
    cols = generator_map(chi)
    dense = [[col.get(j, 0) for j in range(tgt.dim)] for col in cols]
    for i in range(src.dim):
        for k in range(src.dim):
            if tgt.sigma(dense[i], dense[k]) != src.S[i][k]:
                return False
    return True


def timeslice_reduce(M: LatticeSpacetime, f: TestFunction, slab: CauchySlab) -> TestFunction:
    """A test function supported on rows ``t_low, t_low+1`` of the slab with ``E f' = E f``.

    With ``u = E f`` and ``psi`` the step that is 0 up to row ``t_low`` and 1
    above, ``f' = P(psi u) - psi P u``.  The correction ``psi P u`` only differs
    from zero on the last row, where ``E_ret`` leaves the lattice.  Only the
    slab's component is reduced; other components are returned unchanged.
    """
    if f.spacetime != M or slab.spacetime != M:
        raise SpacetimeMismatch("test function, slab and spacetime disagree")
    c, t0 = slab.component, slab.t_low
    u = causal_propagate(M, f)
    vals = list(f.values)
    for i, (cc, t, x) in enumerate(M.sites):
        if cc != c:
            continue
        if t == t0:
            vals[i] = u[(c, t0 + 1, x)]
        elif t == t0 + 1:
            vals[i] = q(-u[(c, t0, x)])
        else:
            vals[i] = 0
    return TestFunction(M, tuple(vals))


def timeslice_reduce_literal(M: LatticeSpacetime, f: TestFunction, slab: CauchySlab) -> TestFunction:
    """``P(psi E f) - psi P(E f)`` evaluated through the stencil (oracle for :func:`timeslice_reduce`)."""
    c, t0 = slab.component, slab.t_low
    u = causal_propagate(M, f)
    psi = lambda s: 1 if s[0] == c and s[1] > t0 else 0
    pu = TestFunction(M, tuple(v * psi(s) for s, v in zip(M.sites, u.values)))
    a = apply_kg(M, pu)
    b = apply_kg(M, u)
    vals = []
    for s, av, bv, fv in zip(M.sites, a.values, b.values, f.values):
        vals.append(q(av - psi(s) * bv) if s[0] == c else fv)
    return TestFunction(M, tuple(vals))


@dataclass(frozen=True)
class TensorSplit:
    """``A = sum_k left[k] (x) right[k]`` over the two components of a disjoint union.

    ``cross_pairing`` collects the commutator pairings between generators of
    different components; locality makes every entry zero.
    """

    spacetime: LatticeSpacetime
    left_space: LatticeSpacetime
    right_space: LatticeSpacetime
    terms: tuple[tuple[Observable, Observable], ...]
    cross_pairing: tuple[tuple[Number, ...], ...]

    @property
    def cross_pairing_vanishes(self) -> bool:
        return all(v == 0 for row in self.cross_pairing for v in row)


def tensor_split(M: LatticeSpacetime, A: Observable) -> TensorSplit:
    if len(M.components) != 2:
        raise WrongComponentCount(f"expected two components, got {len(M.components)}")
    if A.spacetime != M:
        raise SpacetimeMismatch("observable does not live on M")
    sp = phase_space(M)
    M1, M2 = M.component_spacetime(0), M.component_spacetime(1)
    sp1, sp2 = phase_space(M1), phase_space(M2)
    cut = sp.offsets[1]
    grouped: dict[tuple, dict] = {}
    for mono, coef in A.terms.items():
        k = next((n for n, i in enumerate(mono) if i >= cut), len(mono))
        left, right = mono[:k], tuple(i - cut for i in mono[k:])
        grouped.setdefault(right, {})[left] = coef
    terms = tuple((Observable(sp1, lefts), Observable(sp2, {right: 1}))
                  for right, lefts in sorted(grouped.items()))
    cross = tuple(tuple(sp.S[i][j] for j in range(cut, sp.dim)) for i in range(cut))
    return TensorSplit(M, M1, M2, terms, cross)


def tensor_join(split: TensorSplit) -> Observable:
    """``sum_k alpha_iota1(left_k) alpha_iota2(right_k)``, the inverse of :func:`tensor_split`."""
    i1, i2 = injections(split.left_space, split.right_space)
    if i1.target != split.spacetime:
        raise SpacetimeMismatch("split does not match its spacetime")
    out = Observable(phase_space(split.spacetime))
    for left, right in split.terms:
        out = out + multiply(morphism_action(i1, left), morphism_action(i2, right))
    return out


def scalar_value(A: Observable):
    """The coefficient of a scalar observable (every observable on the empty spacetime)."""
    if not A.is_scalar():
        raise ValueError("observable is not a multiple of the unit")
    return A.terms.get((), 0)


def field(M: LatticeSpacetime, p, weight: Number = 1) -> Observable:
    """``phi`` smeared with a delta at site ``p``."""
    return smeared_field(M, TestFunction.delta(M, p, weight))
