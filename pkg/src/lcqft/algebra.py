"""Canonical phase space coordinates and the polynomial CCR algebra.

A smeared field ``phi(f)`` depends on ``f`` only through ``E f``.  On a full
component the solution ``E f`` is fixed by its values on rows 0 and 1, and
those ``2 n_x`` numbers are the canonical coordinates of the generator.  On a
masked component the coordinates are the values of ``E f`` on a greedily
chosen set of sites that determines it.

Observables are finite sums of ordered monomials ``e_{i1} ... e_{ik}`` with
``i1 <= ... <= ik`` in the canonical basis, reordered with
``[e_i, e_j] = i S_ij`` where ``S_ij = <f_i, E f_j>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import SpacetimeMismatch
from .exact import I, Number, Qi, independent_rows, inverse, q
from .green import GreenOperators, TestFunction, green_operators
from .lattice import LatticeSpacetime


@dataclass(frozen=True, eq=False)
class ComponentPhase:
    """Canonical coordinates of one component.

    ``pivots`` are the sites whose ``E f`` values are the coordinates;
    ``preimages[i]`` is a test function (site index -> value) whose canonical
    coordinates are the ``i``-th unit vector.
    """

    spacetime: LatticeSpacetime
    green: GreenOperators
    pivots: tuple[int, ...]
    preimages: tuple[dict, ...]
    symplectic: tuple[tuple, ...]

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def coordinates(self, values: Sequence[Number]) -> list[Number]:
        nz = [(j, v) for j, v in enumerate(values) if v]
        E = self.green.E
        return [q(sum((E[p][j] * v for j, v in nz), 0)) for p in self.pivots]


@lru_cache(maxsize=256)
def component_phase(M: LatticeSpacetime) -> ComponentPhase:
    comp = M.single
    G = green_operators(M)
    n = len(M.sites)
    if comp.is_full:
        pivots = tuple(range(2 * comp.n_x))  # rows 0 and 1 in site order
    else:
        pivots = tuple(independent_rows(G.E))
    CE = [G.E[p] for p in pivots]
    r = len(pivots)
    cols = independent_rows([[row[j] for row in CE] for j in range(n)], limit=r)
    square = [[CE[i][j] for j in cols] for i in range(r)]
    inv = inverse(square)
    preimages = tuple({cols[k]: inv[k][i] for k in range(r) if inv[k][i]} for i in range(r))
    # S_ij = <f_i, E f_j>
    Ef = []
    for pre in preimages:
        Ef.append([q(sum((row[k] * v for k, v in pre.items()), 0)) for row in G.E])
    S = tuple(tuple(q(sum((v * Ef[j][k] for k, v in preimages[i].items()), 0))
                    for j in range(r)) for i in range(r))
    return ComponentPhase(M, G, pivots, preimages, S)


class PhaseSpace:
    """Canonical coordinates of all components of a spacetime, concatenated."""

    def __init__(self, M: LatticeSpacetime):
        self.spacetime = M
        self.parts = [component_phase(M.component_spacetime(c)) for c in range(len(M.components))]
        offsets, k = [], 0
        for part in self.parts:
            offsets.append(k)
            k += part.dim
        self.offsets = tuple(offsets)
        self.dim = k
        S = [[0] * k for _ in range(k)]
        for off, part in zip(self.offsets, self.parts):
            for i, row in enumerate(part.symplectic):
                for j, v in enumerate(row):
                    S[off + i][off + j] = v
        self.S = tuple(map(tuple, S))
        self._normal_cache: dict[tuple, dict] = {}

    def __repr__(self):
        return f"PhaseSpace(dim={self.dim}, components={len(self.parts)})"

    def component_of(self, i: int) -> int:
        for c in range(len(self.parts) - 1, -1, -1):
            if i >= self.offsets[c]:
                return c
        raise IndexError(i)

    def canonical(self, f: TestFunction) -> tuple[Number, ...]:
        """Canonical coordinates of ``phi(f)``."""
        if f.spacetime != self.spacetime:
            raise SpacetimeMismatch("test function does not live on this spacetime")
        M = self.spacetime
        out: list[Number] = []
        start = 0
        for c, part in enumerate(self.parts):
            n = len(M.components[c].sites)
            out.extend(part.coordinates(f.values[start:start + n]))
            start += n
        return tuple(out)

    def preimage(self, i: int) -> TestFunction:
        """A test function whose canonical coordinates are the unit vector ``e_i``."""
        c = self.component_of(i)
        part = self.parts[c]
        M = self.spacetime
        base = sum(len(M.components[k].sites) for k in range(c))
        vals = [0] * len(M.sites)
        for j, v in part.preimages[i - self.offsets[c]].items():
            vals[base + j] = v
        return TestFunction(M, tuple(vals))

    def sigma(self, u: Sequence[Number], v: Sequence[Number]) -> Number:
        """``<f, E g>`` computed from canonical coordinates of ``f`` and ``g``."""
        total = 0
        for i, ui in enumerate(u):
            if ui:
                row = self.S[i]
                total += ui * sum((row[j] * vj for j, vj in enumerate(v) if vj), 0)
        return q(total)

    def normal_order(self, word: tuple[int, ...]) -> dict[tuple[int, ...], Qi]:
        """Expand an arbitrary word of generators in the ordered basis."""
        cached = self._normal_cache.get(word)
        if cached is not None:
            return cached
        for k in range(len(word) - 1):
            a, b = word[k], word[k + 1]
            if a > b:
                res = dict(self.normal_order(word[:k] + (b, a) + word[k + 2:]))
                s = self.S[a][b]
                if s:
                    for w, c in self.normal_order(word[:k] + word[k + 2:]).items():
                        res[w] = res.get(w, Qi()) + c * I * s
                res = {w: c for w, c in res.items() if c}
                break
        else:
            res = {word: Qi(1)}
        self._normal_cache[word] = res
        return res


_spaces: dict[LatticeSpacetime, PhaseSpace] = {}


def phase_space(M: LatticeSpacetime) -> PhaseSpace:
    """Shared :class:`PhaseSpace` per spacetime; rebuilding on a race is harmless."""
    ps = _spaces.get(M)
    if ps is None:
        ps = _spaces.setdefault(M, PhaseSpace(M))
    return ps


class Observable:
    """An element of the polynomial field algebra of a spacetime, in normal form."""

    __slots__ = ("space", "terms")

    def __init__(self, space: PhaseSpace, terms: Mapping[tuple, object] = ()):
        self.space = space
        clean = {}
        for k, v in dict(terms).items():
            v = Qi.coerce(v)
            if v:
                clean[tuple(k)] = v
        self.terms = clean

    @property
    def spacetime(self) -> LatticeSpacetime:
        return self.space.spacetime

    @classmethod
    def unit(cls, space: PhaseSpace, scalar=1) -> "Observable":
        return cls(space, {(): scalar})

    @classmethod
    def linear(cls, space: PhaseSpace, coords: Sequence) -> "Observable":
        return cls(space, {(i,): c for i, c in enumerate(coords) if c})

    def _same(self, other: "Observable"):
        if other.space.spacetime != self.space.spacetime:
            raise SpacetimeMismatch("observables live on different spacetimes")

    def __eq__(self, other):
        if not isinstance(other, Observable):
            return NotImplemented
        return self.space.spacetime == other.space.spacetime and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Observable") -> "Observable":
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Qi()) + v
        return Observable(self.space, out)

    def __neg__(self):
        return Observable(self.space, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Observable") -> "Observable":
        return self + (-other)

    def scale(self, c) -> "Observable":
        c = Qi.coerce(c)
        return Observable(self.space, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Observable):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(k == () for k in self.terms)

    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def adjoint(self) -> "Observable":
        """``A*``: generators are self-adjoint and coefficients conjugate."""
        out = Observable(self.space)
        for k, v in self.terms.items():
            rev = Observable(self.space, self.space.normal_order(tuple(reversed(k))))
            out = out + rev.scale(v.conjugate())
        return out

    def __repr__(self):
        if not self.terms:
            return "Observable(0)"
        parts = []
        for k in sorted(self.terms, key=lambda k: (len(k), k)):
            mono = "*".join(f"e{i}" for i in k) or "1"
            parts.append(f"{self.terms[k]}*{mono}")
        return "Observable(" + " + ".join(parts) + ")"


def multiply(A: Observable, B: Observable) -> Observable:
    """The algebra product, returned in normal form."""
    A._same(B)
    sp = A.space
    out: dict[tuple, Qi] = {}
    for ka, va in A.terms.items():
        for kb, vb in B.terms.items():
            coef = va * vb
            for w, c in sp.normal_order(ka + kb).items():
                out[w] = out.get(w, Qi()) + coef * c
    return Observable(sp, out)


def commutator(A: Observable, B: Observable) -> Observable:
    return multiply(A, B) - multiply(B, A)


def smeared_field(M: LatticeSpacetime, f: TestFunction) -> Observable:
    """``phi(f)`` as a degree-one observable."""
    if f.spacetime != M:
        raise SpacetimeMismatch("test function does not live on M")
    sp = phase_space(M)
    return Observable.linear(sp, sp.canonical(f))


def apply_linear_map(A: Observable, columns: Sequence[Mapping[int, Number]],
                     target: PhaseSpace) -> Observable:
    """Unital homomorphism sending generator ``e_i`` to ``sum_j columns[i][j] e_j``."""
    gens = [Observable(target, {(j,): v for j, v in col.items()}) for col in columns]
    out = Observable(target)
    memo: dict[tuple, Observable] = {(): Observable.unit(target)}
    for k, v in A.terms.items():
        if k not in memo:
            img = memo[()]
            for n in range(1, len(k) + 1):
                pre = k[:n]
                if pre not in memo:
                    memo[pre] = multiply(img, gens[k[n - 1]])
                img = memo[pre]
        out = out + memo[k].scale(v)
    return out
