"""Cauchy-surface germs, propagation between slabs and relative Cauchy evolution.

A germ of an observable at a slab is its family of preimages in the algebras
of nested slab neighbourhoods; the preimage in a neighbourhood ``N`` is
obtained by reducing every generator into ``N`` with :func:`timeslice_reduce`.

Relative Cauchy evolution compares the dynamics of ``M`` with that of the
perturbed lattice ``M + kappa``.  On test functions it is the map

    R f = reduce_{N-}^{M+kappa}( reduce_{N+}^{M}(f) ),

and ``beta_kappa(phi(f)) = phi(R f)``.  Differentiating the perturbed causal
propagator gives ``dE/ds = -E_ret K E_ret + E_adv K E_adv`` with ``K`` the
perturbation of ``P``, which yields :func:`rce_derivative` without reference
to the commutator computation in :func:`stress_energy_commutator`.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .algebra import Observable, apply_linear_map, commutator, multiply, phase_space, smeared_field
from .errors import (InvalidSpacetime, PerturbationNotBetweenSlabs, SlabTooThin,
                     SpacetimeMismatch, UnsupportedPerturbationType)
from .exact import I, q
from .functor import morphism_action, timeslice_reduce
from .green import TestFunction, causal_propagate_float, green_operators
from .lattice import AdmissibleEmbedding, CauchySlab, LatticeSpacetime, slab

# rce_derivative = RCE_SIGN * stress_energy_commutator, with T = 1/2 sum dm phi^2
# and [phi(f), phi(g)] = i <f, E g>.
RCE_SIGN = -1

DEFAULT_MARGINS = (1, 2, 3)


# --- germs ------------------------------------------------------------------

def _neighbourhood_rows(M: LatticeSpacetime, sigma: CauchySlab, margin: int) -> tuple[int, int]:
    nb = sigma.neighbourhood(margin)
    if nb.t_high - nb.t_low < 2:
        raise SlabTooThin(f"neighbourhood {nb.t_low}..{nb.t_high} has fewer than three rows")
    return nb.t_low, nb.t_high


def reduction_map(M: LatticeSpacetime, t_low: int, t_high: int, component: int = 0):
    """``alpha_N^{-1}`` on generators, for ``N`` = rows ``t_low..t_high`` of ``M``."""
    N, chi = slab(M, t_low, t_high, component)
    sp_M, sp_N = phase_space(M), phase_space(N)
    inner = CauchySlab(M, t_low, t_low + 1, component)
    cols = []
    for i in range(sp_M.dim):
        red = timeslice_reduce(M, sp_M.preimage(i), inner).pullback(chi)
        cols.append({j: v for j, v in enumerate(sp_N.canonical(red)) if v})
    return N, chi, tuple(cols)


@dataclass(frozen=True, eq=False)
class CauchyGerm:
    """Compatible preimages ``a_N`` of one observable over nested slab neighbourhoods.

    ``neighbourhoods[k]`` is ``(N_k, chi_k: N_k -> M)`` with ``N_0 ⊂ N_1 ⊂ ...``.
    """

    slab: CauchySlab
    neighbourhoods: tuple[tuple[LatticeSpacetime, AdmissibleEmbedding], ...]
    values: tuple[Observable, ...]

    def __eq__(self, other):
        if not isinstance(other, CauchyGerm):
            return NotImplemented
        return self.slab == other.slab and self.values == other.values

    def __hash__(self):
        return hash((self.slab, self.values))

    def transition(self, i: int, j: int) -> AdmissibleEmbedding:
        """The inclusion ``chi_ij: N_j -> N_i`` for ``j <= i``."""
        (Ni, ci), (Nj, cj) = self.neighbourhoods[i], self.neighbourhoods[j]
        off = cj.images[0][1] - ci.images[0][1]
        _, inc = slab(Ni, off, off + Nj.n_t - 1)
        if inc.source != Nj:
            raise SpacetimeMismatch("neighbourhoods are not nested")
        return inc

    def compatibility_failures(self) -> list[tuple[int, int]]:
        """Pairs ``(i, j)`` with ``a_{N_i} != alpha_{chi_ij}(a_{N_j})``."""
        bad = []
        for i in range(len(self.values)):
            for j in range(i):
                if morphism_action(self.transition(i, j), self.values[j]) != self.values[i]:
                    bad.append((i, j))
        return bad

    def is_compatible(self) -> bool:
        return not self.compatibility_failures()

    def include(self) -> Observable:
        """The observable of ``M`` this germ represents."""
        N, chi = self.neighbourhoods[0]
        return morphism_action(chi, self.values[0])


class GermFactory:
    """Maps observables of ``M`` to germs at a fixed slab."""

    def __init__(self, M: LatticeSpacetime, sigma: CauchySlab,
                 margins: Sequence[int] = DEFAULT_MARGINS):
        if sigma.spacetime != M:
            raise SpacetimeMismatch("slab does not live on M")
        self.spacetime = M
        self.slab = sigma
        seen, maps = set(), []
        for m in sorted(margins):
            rows = _neighbourhood_rows(M, sigma, m)
            if rows in seen:
                continue
            seen.add(rows)
            maps.append(reduction_map(M, *rows, sigma.component))
        self._maps = maps
        self.neighbourhoods = tuple((N, chi) for N, chi, _ in maps)

    def germ(self, A: Observable) -> CauchyGerm:
        if A.spacetime != self.spacetime:
            raise SpacetimeMismatch("observable does not live on M")
        vals = tuple(apply_linear_map(A, cols, phase_space(N)) for N, _, cols in self._maps)
        return CauchyGerm(self.slab, self.neighbourhoods, vals)


def germ_algebra(M: LatticeSpacetime, sigma: CauchySlab,
                 margins: Sequence[int] = DEFAULT_MARGINS) -> GermFactory:
    return GermFactory(M, sigma, margins)


def propagate(M: LatticeSpacetime, sigma1: CauchySlab, sigma2: CauchySlab, g: CauchyGerm,
              margins: Sequence[int] = DEFAULT_MARGINS) -> CauchyGerm:
    """Carry a germ at ``sigma1`` to ``sigma2``: include into ``M``, then re-germ."""
    if g.slab != sigma1:
        raise SpacetimeMismatch("germ does not sit at the first slab")
    return germ_algebra(M, sigma2, margins).germ(g.include())


# --- background perturbations ----------------------------------------------

@dataclass(frozen=True)
class BackgroundPerturbation:
    """A coefficient change of a full single-component spacetime between two slabs.

    ``delta_mass_sq`` maps ``(t, x)`` to a rational; ``delta_coupling`` maps
    the edge ``(t, x)`` (between ``x`` and ``x+1``) to a rational.
    """

    base: LatticeSpacetime
    lower: CauchySlab
    upper: CauchySlab
    delta_mass_sq: Mapping = dc_field(default_factory=dict)
    delta_coupling: Mapping = dc_field(default_factory=dict)

    def __post_init__(self):
        comp = self.base.single
        if not comp.is_full:
            raise InvalidSpacetime("perturbations need a full component")
        if self.lower.spacetime != self.base or self.upper.spacetime != self.base:
            raise SpacetimeMismatch("slabs do not live on the base spacetime")
        dm = {(int(t), int(x) % comp.n_x): q(v) for (t, x), v in dict(self.delta_mass_sq).items()}
        dc = {(int(t), int(x) % comp.n_x): q(v) for (t, x), v in dict(self.delta_coupling).items()}
        object.__setattr__(self, "delta_mass_sq", {k: v for k, v in sorted(dm.items()) if v})
        object.__setattr__(self, "delta_coupling", {k: v for k, v in sorted(dc.items()) if v})
        lo, hi = self.lower.t_high, self.upper.t_low
        for t, x in list(self.delta_mass_sq) + list(self.delta_coupling):
            if not lo < t < hi:
                raise PerturbationNotBetweenSlabs(
                    f"perturbation at row {t} is not strictly between rows {lo} and {hi}")

    def __hash__(self):
        return hash((self.base, self.lower, self.upper,
                     tuple(self.delta_mass_sq.items()), tuple(self.delta_coupling.items())))

    @property
    def is_zero(self) -> bool:
        return not self.delta_mass_sq and not self.delta_coupling

    @property
    def is_mass_type(self) -> bool:
        return not self.delta_coupling

    def support(self) -> frozenset:
        comp = self.base.single
        sites = set(self.delta_mass_sq)
        for t, x in self.delta_coupling:
            sites |= {(t, x), (t, (x + 1) % comp.n_x)}
        return frozenset((0, t, x) for t, x in sites)

    def scaled(self, s) -> "BackgroundPerturbation":
        s = q(s)
        return BackgroundPerturbation(self.base, self.lower, self.upper,
                                      {k: v * s for k, v in self.delta_mass_sq.items()},
                                      {k: v * s for k, v in self.delta_coupling.items()})

    def __add__(self, other: "BackgroundPerturbation") -> "BackgroundPerturbation":
        dm, dc = dict(self.delta_mass_sq), dict(self.delta_coupling)
        for k, v in other.delta_mass_sq.items():
            dm[k] = dm.get(k, 0) + v
        for k, v in other.delta_coupling.items():
            dc[k] = dc.get(k, 0) + v
        lower = min(self.lower, other.lower, key=lambda s: s.t_high)
        upper = max(self.upper, other.upper, key=lambda s: s.t_low)
        return BackgroundPerturbation(self.base, lower, upper, dm, dc)

    @cached_property
    def perturbed(self) -> LatticeSpacetime:
        """``M + kappa``; raises :class:`InvalidSpacetime` if coefficients leave their range."""
        comp = self.base.single
        mass = [list(r) for r in comp.mass_sq]
        coup = [list(r) for r in comp.coupling]
        for (t, x), v in self.delta_mass_sq.items():
            mass[t][x] = q(mass[t][x] + v)
        for (t, x), v in self.delta_coupling.items():
            coup[t][x] = q(coup[t][x] + v)
        return LatticeSpacetime((comp.with_coefficients(coup, mass),))

    def apply_K(self, u: TestFunction) -> TestFunction:
        """``K u`` where ``K = P_{M+kappa} - P_M``."""
        M = self.base
        comp = M.single
        n = comp.n_x
        vals = [0] * len(M.sites)
        idx = M.index
        for (t, x), v in self.delta_mass_sq.items():
            vals[idx[(0, t, x)]] += v * u[(0, t, x)]
        for (t, x), v in self.delta_coupling.items():
            grad = u[(0, t, (x + 1) % n)] - u[(0, t, x)]
            vals[idx[(0, t, x)]] -= v * grad
            vals[idx[(0, t, (x + 1) % n)]] += v * grad
        return TestFunction(M, tuple(vals))


def _between_check(kappa: BackgroundPerturbation):
    if kappa.lower.t_high >= kappa.upper.t_low:
        raise PerturbationNotBetweenSlabs("lower slab does not lie below the upper slab")


def rce_test_function(kappa: BackgroundPerturbation, f: TestFunction) -> TestFunction:
    """``R_kappa f``: reduce into ``N+`` on ``M``, then into ``N-`` on ``M + kappa``."""
    M1 = kappa.base
    if f.spacetime != M1:
        raise SpacetimeMismatch("test function does not live on the base spacetime")
    _between_check(kappa)
    M2 = kappa.perturbed
    up, lo = kappa.upper, kappa.lower
    f1 = timeslice_reduce(M1, f, up)
    f2 = timeslice_reduce(M2, f1.reinterpret(M2), CauchySlab(M2, lo.t_low, lo.t_high))
    return f2.reinterpret(M1)


def rce_generator_map(kappa: BackgroundPerturbation) -> tuple[dict, ...]:
    sp = phase_space(kappa.base)
    cols = []
    for i in range(sp.dim):
        coords = sp.canonical(rce_test_function(kappa, sp.preimage(i)))
        cols.append({j: v for j, v in enumerate(coords) if v})
    return tuple(cols)


def rce_automorphism(kappa: BackgroundPerturbation, A: Observable) -> Observable:
    """``beta_kappa(A)``."""
    if A.spacetime != kappa.base:
        raise SpacetimeMismatch("observable does not live on the base spacetime")
    return apply_linear_map(A, rce_generator_map(kappa), A.space)


def rce_preserves_pairing(kappa: BackgroundPerturbation) -> bool:
    sp = phase_space(kappa.base)
    cols = rce_generator_map(kappa)
    dense = [[c.get(j, 0) for j in range(sp.dim)] for c in cols]
    return all(sp.sigma(dense[i], dense[k]) == sp.S[i][k]
               for i in range(sp.dim) for k in range(sp.dim))


# --- derivative and stress-energy -------------------------------------------

def _reduce_solution(M: LatticeSpacetime, u: TestFunction, t0: int) -> TestFunction:
    """The reduction of :func:`timeslice_reduce` written in terms of ``u = E f``."""
    vals = [0] * len(M.sites)
    for i, (_, t, x) in enumerate(M.sites):
        if t == t0:
            vals[i] = u[(0, t0 + 1, x)]
        elif t == t0 + 1:
            vals[i] = q(-u[(0, t0, x)])
    return TestFunction(M, tuple(vals))


def rce_derivative_test_function(kappa: BackgroundPerturbation, f: TestFunction) -> TestFunction:
    """``d/ds R_{s kappa} f`` at ``s = 0`` by first-order perturbation of the Green operators."""
    M = kappa.base
    if f.spacetime != M:
        raise SpacetimeMismatch("test function does not live on the base spacetime")
    _between_check(kappa)
    G = green_operators(M)
    f1 = timeslice_reduce(M, f, kappa.upper)
    ret = G.retarded(kappa.apply_K(G.retarded(f1)))
    adv = G.advanced(kappa.apply_K(G.advanced(f1)))
    du = adv - ret
    return _reduce_solution(M, du, kappa.lower.t_low)


def rce_derivative(kappa: BackgroundPerturbation, f: TestFunction) -> Observable:
    """``d/ds beta_{s kappa}(phi(f))`` at ``s = 0``."""
    return smeared_field(kappa.base, rce_derivative_test_function(kappa, f))


def stress_energy(kappa: BackgroundPerturbation) -> Observable:
    """``T_kappa = 1/2 sum_z dm(z) phi(z)^2``."""
    if not kappa.is_mass_type:
        raise UnsupportedPerturbationType("no stress-energy density for coupling perturbations")
    M = kappa.base
    out = Observable(phase_space(M))
    for (t, x), v in kappa.delta_mass_sq.items():
        ph = smeared_field(M, TestFunction.delta(M, (t, x)))
        out = out + multiply(ph, ph).scale(Fraction(v) / 2)
    return out


def stress_energy_commutator(kappa: BackgroundPerturbation, f: TestFunction) -> Observable:
    """``i [T_kappa, phi(f)]`` computed with the algebra's commutation rule."""
    T = stress_energy(kappa)
    return commutator(T, smeared_field(kappa.base, f)).scale(I)


def background_independence_residual(kappa: BackgroundPerturbation, f: TestFunction) -> Observable:
    """The obstruction ``d beta / d kappa``; nonzero for the matter field alone."""
    return rce_derivative(kappa, f)


# --- float mode -------------------------------------------------------------

def _float_reduce(u: np.ndarray, t0: int) -> np.ndarray:
    out = np.zeros_like(u)
    out[:, t0, :] = u[:, t0 + 1, :]
    out[:, t0 + 1, :] = -u[:, t0, :]
    return out


def _float_coefficients(kappa: BackgroundPerturbation, s: float):
    comp = kappa.base.single
    coupling = np.array([[float(v) for v in r] for r in comp.coupling])
    mass = np.array([[float(v) for v in r] for r in comp.mass_sq])
    for (t, x), v in kappa.delta_mass_sq.items():
        mass[t, x] += s * float(v)
    for (t, x), v in kappa.delta_coupling.items():
        coupling[t, x] += s * float(v)
    return coupling, mass


def rce_float(kappa: BackgroundPerturbation, sources: np.ndarray, s: float) -> np.ndarray:
    """Canonical coordinates (rows 0 and 1 of ``E R_{s kappa} f``) for a batch of sources."""
    comp = kappa.base.single
    c1, m1 = _float_coefficients(kappa, 0.0)
    c2, m2 = _float_coefficients(kappa, s)
    u1 = causal_propagate_float(comp, sources, c1, m1)
    f1 = _float_reduce(u1, kappa.upper.t_low)
    u2 = causal_propagate_float(comp, f1, c2, m2)
    f2 = _float_reduce(u2, kappa.lower.t_low)
    u3 = causal_propagate_float(comp, f2, c1, m1)
    return u3[:, :2, :].reshape(len(sources), -1)


@dataclass(frozen=True)
class ConvergenceReport:
    steps: tuple[float, ...]
    errors: tuple[float, ...]
    order: float
    richardson_residual: float


def fd_convergence(kappa: BackgroundPerturbation, fs: Sequence[TestFunction],
                   steps: Sequence[float] = (1 / 64, 1 / 128)) -> ConvergenceReport:
    """Central differences of ``R_{s kappa}`` against the exact derivative.

    ``order`` is measured from the first two steps, which should halve.
    """
    comp = kappa.base.single
    M = kappa.base
    src = np.zeros((len(fs), comp.n_t, comp.n_x))
    exact = []
    sp = phase_space(M)
    for k, f in enumerate(fs):
        for (_, t, x), v in zip(M.sites, f.values):
            src[k, t, x] = float(v)
        exact.append([float(v) for v in sp.canonical(rce_derivative_test_function(kappa, f))])
    exact = np.array(exact)
    quotients, errors = [], []
    for h in steps:
        d = (rce_float(kappa, src, h) - rce_float(kappa, src, -h)) / (2 * h)
        quotients.append(d)
        errors.append(float(np.max(np.abs(d - exact))))
    order = float(np.log2(errors[0] / errors[1])) if errors[1] > 0 else float("inf")
    rich = (4 * quotients[1] - quotients[0]) / 3
    return ConvergenceReport(tuple(steps), tuple(errors), order,
                             float(np.max(np.abs(rich - exact))))
