"""Seeded verification suites behind the command-line subcommands.

Every suite turns a configuration into a list of named :class:`Check`
objects.  Instance generation happens while building the list and depends
only on the seed, so ``--list-checks`` and repeated runs agree.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import bv
from .algebra import Observable, commutator, multiply, phase_space, smeared_field
from .cauchy import (RCE_SIGN, BackgroundPerturbation, background_independence_residual,
                     fd_convergence, germ_algebra, propagate, rce_automorphism,
                     rce_derivative, rce_preserves_pairing, stress_energy_commutator)
from .errors import ConfigParse
from .fields import (FieldCategory, TemplateField, candidate_from_json, check_naturality,
                     field_brst, field_cohomology_probe, field_product)
from .functor import (is_isotone, morphism_action, pairing_preserved, scalar_value,
                      tensor_join, tensor_split, timeslice_reduce)
from .green import (TestFunction, apply_kg, causal_propagate, green_operators,
                    green_operators_float, kg_matrix)
from .lattice import (AdmissibleEmbedding, CauchySlab, LatticeSpacetime, diamond,
                      disjoint_union, glue_embeddings, injections, is_admissible, slab,
                      translate)
from .report import Check, Outcome


@dataclass
class RunConfig:
    subcommand: str
    seed: int = 0
    mode: str = "exact"
    rce_mode: str = "both"
    tolerance: float | None = None
    spec: str | None = None
    kappa: str | None = None
    fd_steps: tuple[float, ...] = (1 / 64, 1 / 128)
    models: tuple[str, ...] = ()
    ghost_number: int = 0
    max_degree: int = 2
    category: str | None = None
    candidates: str | None = None
    spacetimes: int = 25
    instances: int = 10
    samples: int = 200

    def echo(self) -> dict:
        out = {"subcommand": self.subcommand, "seed": self.seed, "mode": self.mode,
               "tolerance": self.tolerance if self.mode == "float" else None}
        for key in ("spec", "kappa", "category", "candidates"):
            val = getattr(self, key)
            if val is not None:
                out[key] = Path(val).name
        if self.models:
            out["models"] = [Path(m).name for m in self.models]
        if self.subcommand in ("rce", "all"):
            out["rce_mode"] = self.rce_mode
        out.update({"fd_steps": list(self.fd_steps), "ghost_number": self.ghost_number,
                    "max_degree": self.max_degree, "spacetimes": self.spacetimes,
                    "instances": self.instances, "samples": self.samples})
        return out

    @property
    def tol(self) -> float:
        return 1e-10 if self.tolerance is None else self.tolerance


def fixture_path(name: str) -> str:
    return str(resources.files("lcqft").joinpath("fixtures", name))


def load_json(path: str):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParse(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


# --- instance generation ----------------------------------------------------

_COUPLINGS = (Fraction(1), Fraction(1, 2))
_MASSES = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))


def random_spacetime(rng: random.Random, max_sites: int = 200) -> LatticeSpacetime:
    n_t = rng.randint(4, 10)
    n_x = rng.randint(3, min(16, max_sites // n_t))
    if rng.random() < 0.25:
        coupling = [[rng.choice(_COUPLINGS) for _ in range(n_x)] for _ in range(n_t)]
        mass = [[rng.choice(_MASSES) for _ in range(n_x)] for _ in range(n_t)]
    else:
        coupling = [[c] * n_x for c in (rng.choice(_COUPLINGS) for _ in range(n_t))]
        mass = [[m] * n_x for m in (rng.choice(_MASSES) for _ in range(n_t))]
    return LatticeSpacetime.lattice(n_t, n_x, coupling, mass)


def _translation_invariant(M: LatticeSpacetime) -> bool:
    comp = M.single
    return all(len(set(r)) == 1 for r in comp.coupling) and \
        all(len(set(r)) == 1 for r in comp.mass_sq)


def random_test_function(rng: random.Random, M: LatticeSpacetime, support: int = 3,
                         sites=None) -> TestFunction:
    pool = list(M.sites if sites is None else sites)
    vals = {}
    for s in rng.sample(pool, min(support, len(pool))):
        vals[s] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return TestFunction.from_mapping(M, vals)


def random_observable(rng: random.Random, M: LatticeSpacetime, degree: int = 2,
                      terms: int = 3) -> Observable:
    sp = phase_space(M)
    out = Observable.unit(sp, rng.randint(-2, 2))
    for _ in range(terms):
        mono = Observable.unit(sp, Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
        for _ in range(rng.randint(1, degree)):
            mono = multiply(mono, smeared_field(M, random_test_function(rng, M, 2)))
        out = out + mono
    return out


@dataclass
class EmbeddingFamily:
    """Embeddings into one spacetime plus composable pairs ``(chi, chi2)``."""

    embeddings: list = field(default_factory=list)
    pairs: list = field(default_factory=list)


def random_embeddings(rng: random.Random, M: LatticeSpacetime) -> EmbeddingFamily:
    comp = M.single
    fam = EmbeddingFamily()
    fam.embeddings.append(AdmissibleEmbedding.identity(M))
    # slab and a slab inside it
    lo = rng.randint(0, comp.n_t - 3)
    hi = rng.randint(lo + 2, comp.n_t - 1)
    N1, chi1 = slab(M, lo, hi)
    fam.embeddings.append(chi1)
    if N1.n_t >= 4:
        lo2 = rng.randint(0, N1.n_t - 3)
        hi2 = rng.randint(lo2 + 2, N1.n_t - 1)
        N2, chi2 = slab(N1, lo2, hi2)
        fam.embeddings.append(chi2)
        fam.pairs.append((chi2, chi1))
    # a diamond
    t0 = rng.randint(0, comp.n_t - 3)
    t1 = rng.randint(t0 + 2, min(comp.n_t - 1, t0 + 4))
    x0 = rng.randrange(comp.n_x)
    D, chiD = diamond(M, (t0, x0), (t1, x0))
    fam.embeddings.append(chiD)
    if _translation_invariant(M):
        tr = translate(M, rng.randint(1, comp.n_x - 1))
        fam.embeddings.append(tr)
        fam.pairs.append((chi1, tr))
        fam.pairs.append((chiD, tr))
        fam.pairs.append((tr, tr))
    fam.pairs.append((AdmissibleEmbedding.identity(N1), chi1))
    return fam


# --- axioms suite -----------------------------------------------------------


def _fmt(x) -> str:
    return repr(x) if len(repr(x)) <= 400 else repr(x)[:397] + "..."


def _green_check(M: LatticeSpacetime, cfg: RunConfig):
    def run():
        comp = M.single
        sites = M.sites
        n = len(sites)
        P = kg_matrix(M)
        if cfg.mode == "float":
            R, A, E = green_operators_float(M)
            Pm = np.array([[float(v) for v in r] for r in P])
            I = np.eye(n)
            rows_ret = [i for i, (_, t, _x) in enumerate(sites) if t < comp.n_t - 1]
            rows_adv = [i for i, (_, t, _x) in enumerate(sites) if t > 0]
            err = max(np.max(np.abs((Pm @ R - I)[rows_ret])),
                      np.max(np.abs((Pm @ A - I)[rows_adv])),
                      np.max(np.abs(E + E.T)))
            return Outcome(bool(err <= cfg.tol), max_abs_error=float(err))
        G = green_operators(M)
        for j in range(n):
            col_r = [G.E_ret[i][j] for i in range(n)]
            col_a = [G.E_adv[i][j] for i in range(n)]
            for i in range(n):
                t = sites[i][1]
                pr = sum(P[i][k] * col_r[k] for k in range(n) if P[i][k])
                pa = sum(P[i][k] * col_a[k] for k in range(n) if P[i][k])
                want = 1 if i == j else 0
                if t < comp.n_t - 1 and pr != want:
                    return Outcome(False, witness={"identity": "P E_ret", "site": sites[i],
                                                   "source": sites[j]}, max_abs_error=None)
                if t > 0 and pa != want:
                    return Outcome(False, witness={"identity": "P E_adv", "site": sites[i],
                                                   "source": sites[j]}, max_abs_error=None)
                if G.E_ret[i][j] and not M.precedes(sites[j], sites[i]):
                    return Outcome(False, witness={"support": "E_ret", "pair": (sites[i], sites[j])})
                if G.E_adv[i][j] and not M.precedes(sites[i], sites[j]):
                    return Outcome(False, witness={"support": "E_adv", "pair": (sites[i], sites[j])})
                if G.E[i][j] != -G.E[j][i]:
                    return Outcome(False, witness={"antisymmetry": (sites[i], sites[j])})
        # field-equation ideal: phi(P g) = 0 for g inside rows 1..n_t-2
        for s in sites:
            if 1 <= s[1] <= comp.n_t - 2:
                if not smeared_field(M, apply_kg(M, TestFunction.delta(M, s))).is_zero():
                    return Outcome(False, witness={"ideal": s})
        return Outcome(True)
    return run


def _locality_check(M: LatticeSpacetime, cfg: RunConfig, rng: random.Random):
    sampled = [(rng.choice(M.sites), rng.choice(M.sites)) for _ in range(4)]

    def run():
        sites = M.sites
        if cfg.mode == "float":
            _, _, E = green_operators_float(M)
            err = 0.0
            for i, p in enumerate(sites):
                for j, r in enumerate(sites):
                    if not M.causally_related(p, r):
                        err = max(err, abs(E[i, j]))
            return Outcome(err <= cfg.tol, max_abs_error=err)
        G = green_operators(M)
        pairs = 0
        for i, p in enumerate(sites):
            for j, r in enumerate(sites):
                if not M.causally_related(p, r):
                    pairs += 1
                    if G.E[i][j] != 0:
                        return Outcome(False, witness=(p, r), lhs=str(G.E[i][j]), rhs="0")
        for p, r in sampled:
            if M.causally_related(p, r):
                continue
            a = smeared_field(M, TestFunction.delta(M, p))
            b = smeared_field(M, TestFunction.delta(M, r))
            if not commutator(a, b).is_zero():
                return Outcome(False, witness=(p, r))
        return Outcome(True, details={"spacelike_pairs": pairs})
    return run


def _functoriality_check(fam: EmbeddingFamily, rng: random.Random):
    obs = {}
    for chi, _ in fam.pairs:
        obs[id(chi)] = random_observable(rng, chi.source)
    ident = [(chi, random_observable(rng, chi.source)) for chi in fam.embeddings[1:2]]

    def run():
        for chi, A in ident:
            i_src = AdmissibleEmbedding.identity(chi.source)
            if morphism_action(i_src, A) != A:
                return Outcome(False, witness={"identity": repr(chi.source)})
        for chi, after in fam.pairs:
            A = obs[id(chi)]
            lhs = morphism_action(chi.then(after), A)
            rhs = morphism_action(after, morphism_action(chi, A))
            if lhs != rhs:
                return Outcome(False, witness={"pair": (len(chi.source.sites), len(after.target.sites))},
                               lhs=_fmt(lhs), rhs=_fmt(rhs))
        return Outcome(True, details={"pairs": len(fam.pairs)})
    return run


def _isotony_check(fam: EmbeddingFamily):
    def run():
        for k, chi in enumerate(fam.embeddings):
            if not is_isotone(chi):
                return Outcome(False, witness={"embedding": k, "failure": "not injective"})
            if not pairing_preserved(chi):
                return Outcome(False, witness={"embedding": k, "failure": "pairing"})
        return Outcome(True, details={"embeddings": len(fam.embeddings)})
    return run


def _admissibility_check(fam: EmbeddingFamily):
    def run():
        for k, chi in enumerate(fam.embeddings):
            rep = is_admissible(chi)
            if not rep:
                return Outcome(False, witness={"embedding": k, "clause": rep.clause,
                                               "witness": rep.witness})
        for chi, after in fam.pairs:
            rep = is_admissible(chi.then(after))
            if not rep:
                return Outcome(False, witness={"composite": True, "clause": rep.clause})
        return Outcome(True)
    return run


def _timeslice_check(M: LatticeSpacetime, rng: random.Random):
    comp = M.single
    cases = []
    for _ in range(3):
        lo = rng.randint(0, comp.n_t - 2)
        hi = rng.randint(lo + 1, comp.n_t - 1)
        cases.append((random_test_function(rng, M, 4), CauchySlab(M, lo, hi)))

    def run():
        for f, sl in cases:
            g = timeslice_reduce(M, f, sl)
            if causal_propagate(M, g) != causal_propagate(M, f):
                return Outcome(False, witness={"slab": (sl.t_low, sl.t_high), "failure": "Ef' != Ef"})
            if any(not sl.t_low <= t <= sl.t_high for _, t, _ in g.support()):
                return Outcome(False, witness={"slab": (sl.t_low, sl.t_high), "failure": "support"})
            if smeared_field(M, g) != smeared_field(M, f):
                return Outcome(False, witness={"slab": (sl.t_low, sl.t_high), "failure": "canonical"})
        return Outcome(True)
    return run


def _spacelike_diamonds(rng: random.Random, M: LatticeSpacetime):
    comp = M.single
    t0 = rng.randint(0, comp.n_t - 3)
    x0 = rng.randrange(comp.n_x)
    x1 = (x0 + comp.n_x // 2) % comp.n_x
    D1, chi1 = diamond(M, (t0, x0), (t0 + 2, x0))
    D2, chi2 = diamond(M, (t0, x1), (t0 + 2, x1))
    return chi1, chi2


def _tensor_check(rng: random.Random, k: int):
    n_x = rng.randint(8, 12)
    M = LatticeSpacetime.lattice(rng.randint(4, 7), n_x, rng.choice(_COUPLINGS), rng.choice(_MASSES))
    chi1, chi2 = _spacelike_diamonds(rng, M)
    A1 = random_observable(rng, chi1.source)
    A2 = random_observable(rng, chi2.source)

    def run():
        chi = glue_embeddings(chi1, chi2)
        rep = is_admissible(chi)
        if not rep:
            return Outcome(False, witness={"glued": rep.clause})
        U = chi.source
        i1, i2 = injections(chi1.source, chi2.source)
        left = morphism_action(i1, A1)     # A1 (x) 1
        right = morphism_action(i2, A2)    # 1 (x) A2
        if morphism_action(chi, left) != morphism_action(chi1, A1) or \
                morphism_action(chi, right) != morphism_action(chi2, A2):
            return Outcome(False, witness="alpha_chi o alpha_iota != alpha_chi_i")
        c_U = commutator(left, right)
        c_M = commutator(morphism_action(chi1, A1), morphism_action(chi2, A2))
        if not c_U.is_zero() or not c_M.is_zero() or morphism_action(chi, c_U) != c_M:
            return Outcome(False, lhs=_fmt(c_M), rhs="0")
        prod = multiply(left, right) + left
        split = tensor_split(U, prod)
        if not split.cross_pairing_vanishes or tensor_join(split) != prod:
            return Outcome(False, witness="tensor_split round trip")
        s1 = tensor_split(U, left)
        if len(s1.terms) != 1 or s1.terms[0][0] != A1 or not s1.terms[0][1].terms == {(): 1}:
            return Outcome(False, witness="alpha_iota1(A1) != A1 (x) 1")
        return Outcome(True, lhs=_fmt(c_M), rhs="0")
    return run


def _unit_law_check(rng: random.Random):
    M = random_spacetime(rng, 60)

    def run():
        E = LatticeSpacetime.empty()
        if disjoint_union(M, E) != M or disjoint_union(E, M) != M:
            return Outcome(False, witness="M (+) empty != M")
        sp = phase_space(E)
        a = Observable.unit(sp, 3)
        b = Observable.unit(sp, Fraction(1, 2))
        if sp.dim != 0 or scalar_value(multiply(a, b)) != Fraction(3, 2):
            return Outcome(False, witness="A(empty) is not the scalars")
        i1, _ = injections(M, E)
        if i1.target != M or not is_admissible(i1):
            return Outcome(False, witness="injection into M (+) empty")
        return Outcome(True)
    return run


def axioms_suite(cfg: RunConfig) -> list[Check]:
    rng = random.Random(cfg.seed)
    spacetimes = []
    if cfg.spec:
        doc = load_json(cfg.spec)
        spacetimes.append(LatticeSpacetime.from_json(doc))
    while len(spacetimes) < cfg.spacetimes:
        spacetimes.append(random_spacetime(rng))
    checks = []
    total_embeddings = 0
    for k, M in enumerate(spacetimes):
        tag = f"s{k:02d}"
        fam = random_embeddings(rng, M)
        total_embeddings += len(fam.embeddings) + len(fam.pairs)
        checks.append(Check(f"axioms.green.{tag}", _green_check(M, cfg)))
        checks.append(Check(f"axioms.locality.{tag}", _locality_check(M, cfg, rng)))
        checks.append(Check(f"axioms.admissibility.{tag}", _admissibility_check(fam)))
        checks.append(Check(f"axioms.functoriality.{tag}", _functoriality_check(fam, rng)))
        checks.append(Check(f"axioms.isotony.{tag}", _isotony_check(fam)))
        checks.append(Check(f"axioms.timeslice.{tag}", _timeslice_check(M, rng)))
    for k in range(cfg.instances):
        checks.append(Check(f"tensor.causality.i{k:02d}", _tensor_check(rng, k)))
    checks.append(Check("tensor.unit_law", _unit_law_check(rng)))
    n_emb = total_embeddings
    # four embeddings per spacetime: 100 at the default 25 spacetimes
    checks.append(Check("axioms.sample_size",
                        lambda: Outcome(n_emb >= 4 * cfg.spacetimes,
                                        details={"spacetimes": len(spacetimes),
                                                 "embeddings": n_emb})))
    return checks


# --- rce suite --------------------------------------------------------------


def _kappa_from_json(doc, M: LatticeSpacetime) -> BackgroundPerturbation:
    try:
        lower = CauchySlab(M, *map(int, doc["lower"]))
        upper = CauchySlab(M, *map(int, doc["upper"]))
        dm = {(int(t), int(x)): Fraction(str(v)) for t, x, v in doc.get("delta_mass_sq", [])}
        dc = {(int(t), int(x)): Fraction(str(v)) for t, x, v in doc.get("delta_coupling", [])}
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigParse(f"malformed perturbation: {exc!r}") from None
    return BackgroundPerturbation(M, lower, upper, dm, dc)


def _rce_instance(rng: random.Random):
    n_x = rng.randint(5, 7)
    M = LatticeSpacetime.lattice(12, n_x, 1, rng.choice((0, Fraction(1, 2), 1)))
    lower, mid, upper = CauchySlab(M, 1, 2), CauchySlab(M, 5, 6), CauchySlab(M, 9, 10)
    vals = (Fraction(1, 4), Fraction(1, 2), Fraction(1))
    dm1 = {(t, rng.randrange(n_x)): rng.choice(vals) for t in (3, 4)}
    dm2 = {(t, rng.randrange(n_x)): rng.choice(vals) for t in (7, 8)}
    k1 = BackgroundPerturbation(M, lower, mid, dm1)
    k2 = BackgroundPerturbation(M, mid, upper, dm2)
    x = rng.randrange(n_x)
    fd = {(t, x): rng.choice(vals) for t in (3, 4, 5)}
    fd[(7, rng.randrange(n_x))] = rng.choice(vals)
    kfd = BackgroundPerturbation(M, lower, upper, fd)
    fs = [random_test_function(rng, M, 3) for _ in range(2)]
    return M, k1, k2, kfd, fs


def _diff_norm(a: Observable, b: Observable):
    """Largest coefficient modulus of ``a - b`` (exact)."""
    return max((abs(c) for c in (a - b).terms.values()), default=0)


def _gate(cfg: RunConfig, kind: str, run):
    """Skip exact-identity or finite-difference checks according to ``rce_mode``."""
    if cfg.rce_mode in ("both", kind):
        return run
    return lambda: Outcome(None, details={"rce_mode": cfg.rce_mode})


def _rce_checks(tag: str, M, k1, k2, kfd, fs, cfg: RunConfig) -> list[Check]:
    kappa = k1 + k2

    def identity():
        zero = kappa.scaled(0)
        for f in fs:
            A = smeared_field(M, f)
            if rce_automorphism(zero, A) != A:
                return Outcome(False, witness="beta_0(phi(f)) != phi(f)")
        return Outcome(True)

    def pairing():
        return Outcome(rce_preserves_pairing(kappa))

    def stress():
        worst = 0
        for f in fs:
            d = rce_derivative(kappa, f)
            t = stress_energy_commutator(kappa, f).scale(RCE_SIGN)
            worst = max(worst, _diff_norm(d, t))
        d = rce_derivative(kappa, fs[0])
        t = stress_energy_commutator(kappa, fs[0]).scale(RCE_SIGN)
        return Outcome(worst == 0, lhs=_fmt(d), rhs=_fmt(t), max_abs_error=float(worst),
                       details={"sign": RCE_SIGN, "difference_norm": worst})

    def dependence():
        res = [background_independence_residual(kappa, f) for f in fs]
        ok = any(not r.is_zero() for r in res)
        return Outcome(ok, lhs=_fmt(res[0]), rhs="nonzero")

    def factorization():
        A = smeared_field(M, fs[0]) * smeared_field(M, fs[1])
        direct = rce_automorphism(kappa, A)
        composed = rce_automorphism(k1, rce_automorphism(k2, A))
        return Outcome(direct == composed, lhs=_fmt(direct), rhs=_fmt(composed))

    def convergence():
        rep = fd_convergence(kfd, fs, cfg.fd_steps)
        ok = rep.order >= 1.9 and rep.richardson_residual < 1e-8
        return Outcome(ok, max_abs_error=rep.richardson_residual,
                       details={"steps": list(rep.steps), "errors": list(rep.errors),
                                "order": rep.order,
                                "richardson_residual": rep.richardson_residual})

    ex = lambda run: _gate(cfg, "exact", run)
    return [Check(f"rce.identity.{tag}", ex(identity)), Check(f"rce.pairing.{tag}", ex(pairing)),
            Check(f"rce.stress_energy.{tag}", ex(stress)),
            Check(f"rce.background_dependence.{tag}", ex(dependence)),
            Check(f"rce.factorization.{tag}", ex(factorization)),
            Check(f"rce.fd_convergence.{tag}", _gate(cfg, "fd", convergence))]


def _germ_checks(tag: str, rng: random.Random) -> list[Check]:
    n_t = rng.randint(10, 12)
    M = LatticeSpacetime.lattice(n_t, rng.randint(4, 6), 1, rng.choice((0, 1)))
    lows = rng.sample(range(3, n_t - 4), 3)
    s1, s2, s3 = (CauchySlab(M, t, t + 1) for t in lows)
    A = random_observable(rng, M)
    B = random_observable(rng, M)
    f = random_test_function(rng, M, 3)
    h = random_test_function(rng, M, 3)
    g = TestFunction.delta(M, (rng.randint(1, n_t - 2), 0))

    def germs():
        fac = germ_algebra(M, s1)
        if len(fac.neighbourhoods) < 3:
            return Outcome(False, witness="fewer than three nested neighbourhoods")
        for X in (A, B, Observable.unit(phase_space(M))):
            germ = fac.germ(X)
            bad = germ.compatibility_failures()
            if bad:
                return Outcome(False, witness={"pairs": bad})
            if germ.include() != X:
                return Outcome(False, witness="alpha_N(a_N) != A")
        unit = fac.germ(Observable.unit(phase_space(M)))
        if any(v.terms != {(): 1} for v in unit.values):
            return Outcome(False, witness="unit germ is not constant")
        f2 = f + apply_kg(M, g)
        if fac.germ(smeared_field(M, f)) != fac.germ(smeared_field(M, f2)):
            return Outcome(False, witness="germ depends on representative")
        return Outcome(True, details={"neighbourhoods": len(fac.neighbourhoods)})

    def propagation():
        fac1 = germ_algebra(M, s1)
        g1 = fac1.germ(A)
        g12 = propagate(M, s1, s2, g1)
        if propagate(M, s2, s1, g12) != g1:
            return Outcome(False, witness="round trip")
        if propagate(M, s1, s1, g1) != g1:
            return Outcome(False, witness="identity")
        if propagate(M, s2, s3, g12) != propagate(M, s1, s3, g1):
            return Outcome(False, witness="composition law")
        # products (of linear observables, to keep the degree small)
        fa, fb = smeared_field(M, f), smeared_field(M, h)
        ga, gb = fac1.germ(fa), fac1.germ(fb)
        gab = fac1.germ(multiply(fa, fb))
        pa, pb, pab = (propagate(M, s1, s2, x) for x in (ga, gb, gab))
        if any(multiply(x, y) != z for x, y, z in zip(pa.values, pb.values, pab.values)):
            return Outcome(False, witness="product not respected")
        return Outcome(True)

    return [Check(f"cauchy.germ.{tag}", germs), Check(f"cauchy.propagate.{tag}", propagation)]


def rce_suite(cfg: RunConfig) -> list[Check]:
    rng = random.Random(cfg.seed + 1)
    checks = []
    if cfg.spec and cfg.kappa:
        M = LatticeSpacetime.from_json(load_json(cfg.spec))
        kappa = _kappa_from_json(load_json(cfg.kappa), M)
        fs = [random_test_function(rng, M, 3) for _ in range(2)]
        checks += _fixture_rce_checks(M, kappa, fs, cfg)
    for k in range(cfg.instances):
        M, k1, k2, kfd, fs = _rce_instance(rng)
        checks += _rce_checks(f"i{k:02d}", M, k1, k2, kfd, fs, cfg)
        checks += _germ_checks(f"i{k:02d}", rng)
    return checks


def _fixture_rce_checks(M, kappa, fs, cfg) -> list[Check]:
    def identity():
        zero = kappa.scaled(0)
        return Outcome(all(rce_automorphism(zero, smeared_field(M, f)) == smeared_field(M, f)
                           for f in fs))

    def pairing():
        return Outcome(rce_preserves_pairing(kappa))

    def stress():
        if not kappa.is_mass_type:
            return Outcome(None, witness="coupling perturbation: no stress-energy density")
        d = rce_derivative(kappa, fs[0])
        t = stress_energy_commutator(kappa, fs[0]).scale(RCE_SIGN)
        norm = _diff_norm(d, t)
        return Outcome(norm == 0, lhs=_fmt(d), rhs=_fmt(t), max_abs_error=float(norm),
                       details={"sign": RCE_SIGN, "difference_norm": norm})

    def convergence():
        rep = fd_convergence(kappa, fs, cfg.fd_steps)
        ok = rep.order >= 1.9 and rep.richardson_residual < 1e-8
        return Outcome(ok, max_abs_error=rep.richardson_residual,
                       details={"steps": list(rep.steps), "errors": list(rep.errors),
                                "order": rep.order})

    ex = lambda run: _gate(cfg, "exact", run)
    return [Check("rce.fixture.identity", ex(identity)), Check("rce.fixture.pairing", ex(pairing)),
            Check("rce.fixture.stress_energy", ex(stress)),
            Check("rce.fixture.fd_convergence", _gate(cfg, "fd", convergence))]


# --- bv suite ---------------------------------------------------------------


def _bv_checks(model: bv.GaugeModel, cfg: RunConfig) -> list[Check]:
    name = model.name
    rng = random.Random(f"{cfg.seed}:{name}")
    samples = [bv.random_element(model, rng) for _ in range(cfg.samples)]
    pairs = [(bv.random_element(model, rng), bv.random_element(model, rng)) for _ in range(20)]

    def invariants():
        diag = model.diagnostics()
        bad = {k: v for k, v in diag.items() if v}
        return Outcome(not bad, witness=bad or None)

    def nilpotency():
        for u in bv.generator_list(model) + samples:
            for label, img in (("s^2", bv.apply_s(bv.apply_s(u))),
                               ("delta^2", bv.apply_delta(bv.apply_delta(u))),
                               ("gamma^2", bv.apply_gamma(bv.apply_gamma(u))),
                               ("delta gamma + gamma delta",
                                bv.apply_delta(bv.apply_gamma(u)) + bv.apply_gamma(bv.apply_delta(u)))):
                if not img.is_zero():
                    inv = [a for a, _ in model.invariance_violations()]
                    return Outcome(False, witness={"identity": label, "element": repr(u),
                                                   "non_invariant_generators": inv},
                                   lhs=_fmt(img), rhs="0", max_abs_error=None)
        return Outcome(True, details={"elements": len(samples)})

    def bookkeeping():
        for u in samples:
            for g in u.ghost_numbers():
                img = bv.apply_s(u.ghost_component(g))
                if img.ghost_numbers() - {g + 1}:
                    return Outcome(False, witness=repr(u.ghost_component(g)))
        return Outcome(True)

    def leibniz():
        for u, v in pairs:
            for p in (0, 1):
                up = bv.GradedElement(model, {k: c for k, c in u.terms.items()
                                              if bv.key_parity(k) == p})
                lhs = bv.apply_s(up * v)
                rhs = bv.apply_s(up) * v + (up * bv.apply_s(v)).scale(-1 if p else 1)
                if lhs != rhs:
                    return Outcome(False, lhs=_fmt(lhs), rhs=_fmt(rhs), max_abs_error=None)
        return Outcome(True)

    def cohomology():
        res = bv.cohomology(model, cfg.ghost_number, cfg.max_degree)
        return Outcome(True, details={"ghost_number": res.ghost_number,
                                      "max_degree": res.max_degree,
                                      "dimension": res.dimension,
                                      "cocycles": res.cocycle_dimension,
                                      "coboundaries": res.coboundary_rank,
                                      "representatives": [repr(r) for r in res.representatives]})

    checks = [Check(f"bv.{name}.invariants", invariants),
              Check(f"bv.{name}.nilpotency", nilpotency),
              Check(f"bv.{name}.ghost_bookkeeping", bookkeeping),
              Check(f"bv.{name}.leibniz", leibniz)]
    if not model.invariance_violations():
        checks.append(Check(f"bv.{name}.cohomology.k{cfg.ghost_number}.d{cfg.max_degree}",
                            cohomology))
    return checks


def bv_suite(cfg: RunConfig) -> list[Check]:
    paths = cfg.models or (fixture_path("so3.json"), fixture_path("abelian.json"))
    checks = []
    for p in paths:
        model = bv.GaugeModel.from_json(load_json(p))
        checks += _bv_checks(model, cfg)
    return checks


# --- fields suite -----------------------------------------------------------


def _expectation(doc: dict):
    return doc.get("expect", {})


def fields_suite(cfg: RunConfig) -> list[Check]:
    cat_doc = load_json(cfg.category or fixture_path("category.json"))
    cand_doc = load_json(cfg.candidates or fixture_path("candidates.json"))
    try:
        category = FieldCategory.from_json(cat_doc)
        entries = [(d, candidate_from_json(d)) for d in cand_doc["candidates"]]
    except (KeyError, TypeError) as exc:
        raise ConfigParse(f"malformed fields input: {exc!r}") from None
    rng = random.Random(cfg.seed + 2)
    checks = [Check("fields.gauge_intertwining",
                    lambda: Outcome(not category.gauge_violations(),
                                    witness=category.gauge_violations() or None))]

    for doc, cand in entries:
        exp = _expectation(doc)

        def classify(cand=cand, exp=exp):
            (cl,) = field_cohomology_probe(category, [cand], cfg.max_degree)
            got = {"natural": cl.natural, "closed": cl.closed, "exact": cl.exact}
            want = {k: v for k, v in exp.items() if k in got}
            ok = all(got[k] == v for k, v in want.items()) if want else cl.natural
            return Outcome(ok, witness=cl.witness, details={"status": cl.status, **got})
        checks.append(Check(f"fields.candidate.{doc.get('name', cand.name)}", classify))

    natural = [c for d, c in entries if _expectation(d).get("natural", True)]
    ghost_free = [c for c in natural if isinstance(c, TemplateField)
                  and not any(t.ghost for t in c.terms)]
    objects = list(category.objects.values())

    def probes(obj, arity, count):
        M = obj.spacetime
        return [tuple(TestFunction.delta(M, rng.choice(M.sites)) for _ in range(arity))
                for _ in range(count)]

    probe_sets = {obj.name: probes(obj, 2, 4) for obj in objects}
    single = {obj.name: [TestFunction.delta(obj.spacetime, s) for s in obj.spacetime.sites]
              for obj in objects}

    def product_laws():
        for a, b in itertools.product(ghost_free, repeat=2):
            ab, ba = field_product(a, b), field_product(b, a)
            sign = -1 if (a.parity and b.parity) else 1
            for obj in objects:
                for fs in probe_sets[obj.name]:
                    if ab(obj, *fs) != ba(obj, *fs).scale(sign):
                        return Outcome(False, witness={"pair": (a.name, b.name), "object": obj.name})
            nat = check_naturality(ab, category, limit=40, seed=cfg.seed)
            if not nat:
                return Outcome(False, witness={"pair": (a.name, b.name), "morphism": nat.morphism})
        return Outcome(True, details={"fields": [c.name for c in ghost_free]})

    def brst_laws():
        for a in natural:
            sa = field_brst(a)
            ssa = field_brst(sa)
            for obj in objects:
                for f in single[obj.name]:
                    if not ssa(obj, f).is_zero():
                        return Outcome(False, witness={"field": a.name, "identity": "s^2"})
            if not check_naturality(sa, category):
                return Outcome(False, witness={"field": a.name, "identity": "naturality of s"})
        for a, b in itertools.product(natural, repeat=2):
            lhs = field_brst(field_product(a, b))
            r1 = field_product(field_brst(a), b)
            r2 = field_product(a, field_brst(b))
            sign = -1 if a.parity else 1
            for obj in objects:
                for fs in probe_sets[obj.name]:
                    if lhs(obj, *fs) != r1(obj, *fs) + r2(obj, *fs).scale(sign):
                        return Outcome(False, witness={"pair": (a.name, b.name), "identity": "Leibniz"})
        return Outcome(True)

    checks.append(Check("fields.product_laws", product_laws))
    checks.append(Check("fields.brst_laws", brst_laws))
    return checks


SUITES = {"axioms": axioms_suite, "rce": rce_suite, "bv": bv_suite, "fields": fields_suite}


def build_checks(cfg: RunConfig) -> list[Check]:
    names = list(SUITES) if cfg.subcommand == "all" else [cfg.subcommand]
    out = []
    for n in names:
        out += SUITES[n](cfg)
    return out
