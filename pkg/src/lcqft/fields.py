"""Fields as natural families of evaluators, their product and BRST differential.

Each object of a :class:`FieldCategory` is a periodic lattice spacetime with
uniform coefficients.  Its value algebra is the classical BV algebra of the
lattice field, ``phi(z)`` and antifields ``phi‡(z)`` for every site ``z``
with action ``S = 1/2 phi . P phi``, extended by one odd ghost ``c`` for the
abelian gauge algebra generated by the unit spatial shift ``tau``.  The ghost
is twisted: ``c u = (-1)^{|u|} tau(u) c``, so that the Chevalley-Eilenberg
part of the differential is ``gamma = -[c, .]``:

    gamma(u) = -(-1)^{|u|} (tau u - u) c,     gamma(c) = 0.

An element ``u0 + u1 c`` is stored as the pair ``(u0, u1)``.  The field
differential is

    (s Phi)(f...) = s(Phi(f...)) + (-1)^{|Phi|} (Phi(shift_* f...) - Phi(f...)) c.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .bv import GaugeModel, GradedElement, apply_delta, key_parity
from .errors import AnsatzTooSmall, CategoryMismatch, ConfigParse, NotAdmissible, SpacetimeMismatch
from .exact import q, solve
from .green import TestFunction, kg_matrix
from .lattice import (AdmissibleEmbedding, LatticeSpacetime, injections, is_admissible,
                      translate)

# --- objects and values -----------------------------------------------------


def _relabel(u: GradedElement, model: GaugeModel, index_map: Sequence[int]) -> GradedElement:
    """Substitute ``x_i -> x_{map[i]}`` and ``x‡_i -> x‡_{map[i]}`` (``map`` injective)."""
    out: dict = {}
    n = model.config_dim
    for (b, x, d, c), v in u.terms.items():
        nx = [0] * n
        for i, e in enumerate(x):
            if e:
                nx[index_map[i]] = e
        img = [index_map[i] for i in d]
        inv = sum(1 for i in range(len(img)) for j in range(i + 1, len(img)) if img[i] > img[j])
        key = (b, tuple(nx), tuple(sorted(img)), c)
        out[key] = out.get(key, 0) + (-v if inv % 2 else v)
    return GradedElement(model, out)


class FieldObject:
    """A spacetime together with its BV value algebra and the unit shift."""

    def __init__(self, name: str, spacetime: LatticeSpacetime):
        for comp in spacetime.components:
            if not comp.is_full:
                raise CategoryMismatch("field objects must be full periodic lattices")
            if len({v for r in comp.coupling for v in r}) > 1 or \
                    len({v for r in comp.mass_sq for v in r}) > 1:
                raise CategoryMismatch("field objects need uniform coefficients")
        self.name = name
        self.spacetime = spacetime
        n = len(spacetime.sites)
        P = kg_matrix(spacetime)
        S: dict = {}
        for i in range(n):
            for j in range(n):
                if P[i][j]:
                    e = [0] * n
                    e[i] += 1
                    e[j] += 1
                    S[tuple(e)] = S.get(tuple(e), 0) + Fraction(P[i][j]) / 2
        self.model = GaugeModel.build(f"lattice-{name}", n, None, [], S)
        self.shift = translate(spacetime, 1)
        idx = spacetime.index
        self.shift_map = tuple(idx[img] for img in self.shift.images)

    def __repr__(self):
        return f"FieldObject({self.name!r})"

    def phi(self, site) -> GradedElement:
        return GradedElement.x(self.model, self.spacetime.index[self.spacetime.site(site)])

    def phid(self, site) -> GradedElement:
        return GradedElement.xd(self.model, self.spacetime.index[self.spacetime.site(site)])

    def tau(self, u: GradedElement) -> GradedElement:
        return _relabel(u, self.model, self.shift_map)

    def shift_test_function(self, f: TestFunction) -> TestFunction:
        return f.pushforward(self.shift)

    def zero(self) -> "TwistedElement":
        return TwistedElement(self, GradedElement(self.model), GradedElement(self.model))

    def lift(self, u: GradedElement) -> "TwistedElement":
        return TwistedElement(self, u, GradedElement(self.model))

    def ghost(self) -> "TwistedElement":
        return TwistedElement(self, GradedElement(self.model), GradedElement.one(self.model))


def _split_parity(u: GradedElement):
    even = {k: v for k, v in u.terms.items() if not key_parity(k)}
    odd = {k: v for k, v in u.terms.items() if key_parity(k)}
    return GradedElement(u.model, even), GradedElement(u.model, odd)


class TwistedElement:
    """``a0 + a1 c`` in the value algebra of a :class:`FieldObject`."""

    __slots__ = ("obj", "a0", "a1")

    def __init__(self, obj: FieldObject, a0: GradedElement, a1: GradedElement):
        self.obj, self.a0, self.a1 = obj, a0, a1

    def _same(self, other: "TwistedElement"):
        if other.obj is not self.obj:
            raise CategoryMismatch("values live over different objects")

    def __add__(self, other):
        self._same(other)
        return TwistedElement(self.obj, self.a0 + other.a0, self.a1 + other.a1)

    def __neg__(self):
        return TwistedElement(self.obj, -self.a0, -self.a1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return TwistedElement(self.obj, self.a0.scale(c), self.a1.scale(c))

    def __mul__(self, other):
        if not isinstance(other, TwistedElement):
            return self.scale(other)
        self._same(other)
        b0e, b0o = _split_parity(other.a0)
        tau = self.obj.tau
        a1 = self.a0 * other.a1 + self.a1 * tau(b0e) - self.a1 * tau(b0o)
        return TwistedElement(self.obj, self.a0 * other.a0, a1)

    def __rmul__(self, c):
        return self.scale(c)

    def times_ghost(self) -> "TwistedElement":
        """``u c``."""
        return TwistedElement(self.obj, GradedElement(self.obj.model), self.a0)

    def __eq__(self, other):
        if not isinstance(other, TwistedElement):
            return NotImplemented
        return self.obj is other.obj and self.a0 == other.a0 and self.a1 == other.a1

    def __hash__(self):
        return hash((self.a0, self.a1))

    def is_zero(self) -> bool:
        return self.a0.is_zero() and self.a1.is_zero()

    def parities(self) -> set[int]:
        return self.a0.parities() | {1 - p for p in self.a1.parities()}

    def ghost_numbers(self) -> set[int]:
        return self.a0.ghost_numbers() | {g + 1 for g in self.a1.ghost_numbers()}

    def gamma(self) -> "TwistedElement":
        even, odd = _split_parity(self.a0)
        tau = self.obj.tau
        a1 = -(tau(even) - even) + (tau(odd) - odd)
        return TwistedElement(self.obj, GradedElement(self.obj.model), a1)

    def delta(self) -> "TwistedElement":
        return TwistedElement(self.obj, apply_delta(self.a0), apply_delta(self.a1))

    def s(self) -> "TwistedElement":
        return self.delta() + self.gamma()

    def relabel(self, target: FieldObject, index_map: Sequence[int]) -> "TwistedElement":
        return TwistedElement(target, _relabel(self.a0, target.model, index_map),
                              _relabel(self.a1, target.model, index_map))

    def __repr__(self):
        if self.a1.is_zero():
            return repr(self.a0)
        return f"({self.a0!r}) + ({self.a1!r})*c"


# --- the category -----------------------------------------------------------


@dataclass(frozen=True)
class FieldMorphism:
    name: str
    source: str
    target: str
    embedding: AdmissibleEmbedding


class FieldCategory:
    """Objects (named), translations and disjoint-union injections."""

    def __init__(self, objects: Mapping[str, LatticeSpacetime],
                 morphisms: Iterable[tuple[str, str, str, AdmissibleEmbedding]]):
        self.objects = {name: FieldObject(name, M) for name, M in objects.items()}
        self.morphisms: list[FieldMorphism] = []
        for name, src, tgt, chi in morphisms:
            if chi.source != self.objects[src].spacetime or chi.target != self.objects[tgt].spacetime:
                raise CategoryMismatch(f"morphism {name} does not match its objects")
            rep = is_admissible(chi)
            if not rep:
                raise NotAdmissible(f"morphism {name}: {rep.clause} {rep.witness}")
            self.morphisms.append(FieldMorphism(name, src, tgt, chi))
        self._index_maps = {}
        for mor in self.morphisms:
            T = self.objects[mor.target].spacetime
            self._index_maps[mor.name] = tuple(T.index[img] for img in mor.embedding.images)

    def gauge_violations(self) -> list[str]:
        """Morphisms that do not intertwine the unit shifts."""
        bad = []
        for mor in self.morphisms:
            N, M = self.objects[mor.source], self.objects[mor.target]
            if mor.embedding.then(M.shift).images != N.shift.then(mor.embedding).images:
                bad.append(mor.name)
        return bad

    def alpha(self, mor: FieldMorphism, value: TwistedElement) -> TwistedElement:
        return value.relabel(self.objects[mor.target], self._index_maps[mor.name])

    @classmethod
    def default(cls) -> "FieldCategory":
        """Two lattices, the union of the first with itself, shifts and injections."""
        A = LatticeSpacetime.lattice(3, 4, coupling=1, mass_sq=1)
        B = LatticeSpacetime.lattice(3, 5, coupling=1, mass_sq=1)
        return cls.from_spec({"A": A, "B": B}, {"U": ("A", "A")})

    @classmethod
    def from_spec(cls, base: Mapping[str, LatticeSpacetime],
                  unions: Mapping[str, tuple[str, str]]) -> "FieldCategory":
        objects = dict(base)
        morphisms = []
        for name, (l, r) in unions.items():
            i1, i2 = injections(base[l], base[r])
            objects[name] = i1.target
            morphisms.append((f"{name}.inj0", l, name, i1))
            morphisms.append((f"{name}.inj1", r, name, i2))
        for name, M in objects.items():
            if len(M.components) == 1:
                for dx in range(1, M.n_x):
                    morphisms.append((f"{name}.shift{dx}", name, name, translate(M, dx)))
            else:
                for c in range(len(M.components)):
                    morphisms.append((f"{name}.shift1@{c}", name, name, translate(M, 1, c)))
                morphisms.append((f"{name}.shift1", name, name, translate(M, 1)))
        return cls(objects, morphisms)

    @classmethod
    def from_json(cls, doc: Mapping) -> "FieldCategory":
        try:
            base = {k: LatticeSpacetime.from_json(v) for k, v in doc["objects"].items()}
            unions = {k: tuple(v) for k, v in doc.get("unions", {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigParse(f"malformed field category: {exc!r}") from exc
        return cls.from_spec(base, unions)


# --- fields -----------------------------------------------------------------


class NatField:
    """A family of multilinear evaluators ``Phi_M(f_1, ..., f_k)``."""

    def __init__(self, arity: int, ghost: int, name: str = "field"):
        self.arity = arity
        self.ghost = ghost
        self.name = name
        self._cache: dict = {}

    @property
    def parity(self) -> int:
        return self.ghost % 2

    def _evaluate(self, obj: FieldObject, fs: tuple[TestFunction, ...]) -> TwistedElement:
        raise NotImplementedError

    def __call__(self, obj: FieldObject, *fs: TestFunction) -> TwistedElement:
        if len(fs) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} test functions")
        for f in fs:
            if f.spacetime != obj.spacetime:
                raise SpacetimeMismatch("test function does not live on the object")
        key = (obj.name, id(obj), fs)
        val = self._cache.get(key)
        if val is None:
            val = self._evaluate(obj, fs)
            self._cache[key] = val
        return val

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r}, arity={self.arity}, ghost={self.ghost})"


@dataclass(frozen=True)
class TemplateTerm:
    """``coef * prod phi(z + o) * prod phi‡(z + o) [* c]`` with offsets ``o = (dt, dx)``."""

    coef: Fraction
    phi: tuple[tuple[int, int], ...] = ()
    phid: tuple[tuple[int, int], ...] = ()
    ghost: bool = False

    @property
    def ghost_number(self) -> int:
        return -len(self.phid) + (1 if self.ghost else 0)


class TemplateField(NatField):
    """``Phi_M(f) = sum_z f(z) sum_terms term(z)``: natural by construction."""

    def __init__(self, terms: Sequence[TemplateTerm], name: str = "template"):
        gh = {t.ghost_number for t in terms}
        if len(gh) > 1:
            raise ValueError("template terms must share one ghost number")
        super().__init__(1, gh.pop() if gh else 0, name)
        self.terms = tuple(terms)

    def _evaluate(self, obj, fs):
        (f,) = fs
        M = obj.spacetime
        out = obj.zero()
        for (c, t, x), v in zip(M.sites, f.values):
            if not v:
                continue
            comp = M.components[c]
            for term in self.terms:
                val = GradedElement.one(obj.model, term.coef * v)
                ok = True
                for kind, offs in (("phi", term.phi), ("phid", term.phid)):
                    for dt, dx in offs:
                        tt = t + dt
                        if not 0 <= tt < comp.n_t:
                            ok = False
                            break
                        site = (c, tt, (x + dx) % comp.n_x)
                        val = val * (obj.phi(site) if kind == "phi" else obj.phid(site))
                    if not ok:
                        break
                if not ok:
                    continue
                tw = obj.lift(val)
                out = out + (tw.times_ghost() if term.ghost else tw)
        return out

    @classmethod
    def from_json(cls, doc: Mapping) -> "TemplateField":
        terms = []
        for t in doc["terms"]:
            terms.append(TemplateTerm(q(Fraction(str(t.get("coef", 1)))),
                                      tuple(tuple(o) for o in t.get("phi", [])),
                                      tuple(tuple(o) for o in t.get("phid", [])),
                                      bool(t.get("ghost", False))))
        return cls(terms, doc.get("name", "template"))


class FixedSiteField(NatField):
    """``Phi_M(f) = f(p0) phi(p0)`` at an absolute site: deliberately not natural."""

    def __init__(self, site=(0, 1, 1), name: str = "fixed-site"):
        super().__init__(1, 0, name)
        self.site = tuple(site)

    def _evaluate(self, obj, fs):
        (f,) = fs
        M = obj.spacetime
        p = M.site(self.site)
        return obj.lift(obj.phi(p).scale(f[p]))


class CallableField(NatField):
    """Evaluators given by a Python callable ``fn(obj, *fs) -> TwistedElement``."""

    def __init__(self, arity: int, ghost: int, fn: Callable, name: str = "callable"):
        super().__init__(arity, ghost, name)
        self.fn = fn

    def _evaluate(self, obj, fs):
        return self.fn(obj, *fs)


def unit_field() -> TemplateField:
    """``Phi_M(f) = (sum f) 1``."""
    return TemplateField([TemplateTerm(Fraction(1))], "unit")


def density_field() -> TemplateField:
    """``Phi_M(f) = sum_z f(z) phi(z)^2``."""
    return TemplateField([TemplateTerm(Fraction(1), ((0, 0), (0, 0)))], "density")


def exact_fixture_theta() -> TemplateField:
    """``Theta_M(f) = sum_z f(z) phi‡(z) phi(z)``; its differential is a closed, exact field."""
    return TemplateField([TemplateTerm(Fraction(1), ((0, 0),), ((0, 0),))], "theta")


class ProductField(NatField):
    """The symmetrised product of two fields."""

    def __init__(self, left: NatField, right: NatField):
        super().__init__(left.arity + right.arity, left.ghost + right.ghost,
                         f"({left.name}*{right.name})")
        self.left, self.right = left, right

    def _evaluate(self, obj, fs):
        p, k = self.left.arity, self.arity
        out = obj.zero()
        for perm in itertools.permutations(range(k)):
            a = self.left(obj, *(fs[i] for i in perm[:p]))
            b = self.right(obj, *(fs[i] for i in perm[p:]))
            out = out + a * b
        return out.scale(Fraction(1, math.factorial(p) * math.factorial(k - p)))


class BRSTField(NatField):
    """``s Phi``."""

    def __init__(self, inner: NatField):
        super().__init__(inner.arity, inner.ghost + 1, f"s({inner.name})")
        self.inner = inner

    def first_term(self, obj, *fs) -> TwistedElement:
        return self.inner(obj, *fs).s()

    def second_term(self, obj, *fs) -> TwistedElement:
        shifted = tuple(obj.shift_test_function(f) for f in fs)
        diff = self.inner(obj, *shifted) - self.inner(obj, *fs)
        sign = -1 if self.inner.parity else 1
        return diff.times_ghost().scale(sign)

    def _evaluate(self, obj, fs):
        return self.first_term(obj, *fs) + self.second_term(obj, *fs)


class LinearCombination(NatField):
    def __init__(self, fields: Sequence[NatField], coefs: Sequence, name: str = "combination"):
        ar = {f.arity for f in fields}
        gh = {f.ghost for f in fields}
        if len(ar) > 1 or len(gh) > 1:
            raise CategoryMismatch("combined fields must share arity and ghost number")
        super().__init__(ar.pop(), gh.pop(), name)
        self.fields, self.coefs = tuple(fields), tuple(q(c) for c in coefs)

    def _evaluate(self, obj, fs):
        out = obj.zero()
        for f, c in zip(self.fields, self.coefs):
            if c:
                out = out + f(obj, *fs).scale(c)
        return out


def field_product(phi: NatField, psi: NatField) -> ProductField:
    return ProductField(phi, psi)


def field_brst(phi: NatField) -> BRSTField:
    return BRSTField(phi)


# --- naturality -------------------------------------------------------------


def _delta_tuples(obj: FieldObject, arity: int, limit: int, rng: random.Random):
    M = obj.spacetime
    deltas = [TestFunction.delta(M, s) for s in M.sites]
    total = len(deltas) ** arity
    if total <= limit:
        return [tuple(t) for t in itertools.product(deltas, repeat=arity)]
    return [tuple(rng.choice(deltas) for _ in range(arity)) for _ in range(limit)]


@dataclass(frozen=True)
class NaturalityReport:
    ok: bool
    morphism: str | None = None
    sites: tuple | None = None

    def __bool__(self):
        return self.ok


def check_naturality(phi: NatField, category: FieldCategory, limit: int = 200,
                     seed: int = 0) -> NaturalityReport:
    """``alpha_chi(Phi_N(f...)) = Phi_M(chi_* f...)`` on delta tuples for every morphism."""
    rng = random.Random(seed)
    for mor in category.morphisms:
        N, M = category.objects[mor.source], category.objects[mor.target]
        for fs in _delta_tuples(N, phi.arity, limit, rng):
            lhs = category.alpha(mor, phi(N, *fs))
            rhs = phi(M, *(f.pushforward(mor.embedding) for f in fs))
            if lhs != rhs:
                sites = tuple(next(iter(f.support())) for f in fs)
                return NaturalityReport(False, mor.name, sites)
    return NaturalityReport(True)


# --- cohomology probe -------------------------------------------------------

_OFFSETS = tuple((dt, dx) for dt in (-1, 0, 1) for dx in (-1, 0, 1))


def local_ansatz(max_degree: int = 2, offsets: Sequence[tuple[int, int]] = _OFFSETS):
    """Ghost-number -1 templates ``phi‡(z) * (phi-monomial of degree <= max_degree)``."""
    out = []
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(offsets, deg):
            out.append(TemplateField([TemplateTerm(Fraction(1), combo, ((0, 0),))],
                                     f"ansatz{len(out)}"))
    return out


def _probe_functions(category: FieldCategory):
    """Deltas on the ``x = 0`` column of every component of every object.

    For natural fields the remaining columns follow by translation.
    """
    for obj in category.objects.values():
        for c, t, x in obj.spacetime.sites:
            if x == 0:
                yield obj, TestFunction.delta(obj.spacetime, (c, t, x))


def _coordinates(v: TwistedElement):
    out = {}
    for k, c in v.a0.terms.items():
        out[(0,) + k] = c
    for k, c in v.a1.terms.items():
        out[(1,) + k] = c
    return out


def _template_degree(phi: NatField) -> int | None:
    if isinstance(phi, TemplateField):
        return max((len(t.phi) for t in phi.terms), default=0)
    if isinstance(phi, BRSTField):
        inner = _template_degree(phi.inner)
        return None if inner is None else inner + 1
    if isinstance(phi, LinearCombination):
        degs = [_template_degree(f) for f in phi.fields]
        return None if None in degs else max(degs, default=0)
    return None


@dataclass(frozen=True)
class Classification:
    name: str
    natural: bool
    closed: bool | None
    exact: bool | None
    status: str
    witness: tuple | None = None


def is_closed(phi: NatField, category: FieldCategory) -> bool:
    sphi = field_brst(phi)
    for obj in category.objects.values():
        for s in obj.spacetime.sites:
            if not sphi(obj, TestFunction.delta(obj.spacetime, s)).is_zero():
                return False
    return True


def exactness_coefficients(phi: NatField, category: FieldCategory,
                           ansatz: Sequence[NatField]):
    """``lambda`` with ``sum lambda_j s(Theta_j) = Phi`` on all probes, or ``None``."""
    images = [field_brst(theta) for theta in ansatz]
    rows: dict = {}
    rhs: dict = {}
    for p_idx, (obj, f) in enumerate(_probe_functions(category)):
        for j, im in enumerate(images):
            for k, v in _coordinates(im(obj, f)).items():
                rows.setdefault((obj.name, p_idx) + (k,), {})[j] = v
        for k, v in _coordinates(phi(obj, f)).items():
            rhs[(obj.name, p_idx) + (k,)] = v
            rows.setdefault((obj.name, p_idx) + (k,), {})
    keys = sorted(rows, key=repr)
    matrix = [[rows[k].get(j, 0) for j in range(len(ansatz))] for k in keys]
    b = [rhs.get(k, 0) for k in keys]
    if not matrix:
        return [0] * len(ansatz)
    return solve(matrix, b)


def field_cohomology_probe(category: FieldCategory, candidates: Sequence[NatField],
                           ansatz_degree: int = 2) -> list[Classification]:
    """Classify ghost-number-0 arity-1 candidates as natural / closed / exact in the ansatz."""
    ansatz = local_ansatz(ansatz_degree)
    out = []
    for phi in candidates:
        nat = check_naturality(phi, category)
        if not nat:
            out.append(Classification(phi.name, False, None, None, "not natural",
                                      (nat.morphism, nat.sites)))
            continue
        closed = is_closed(phi, category)
        if not closed:
            out.append(Classification(phi.name, True, False, None, "not closed"))
            continue
        deg = _template_degree(phi)
        if deg is None or deg > ansatz_degree + 1:
            out.append(Classification(phi.name, True, True, None,
                                      f"undecided: {AnsatzTooSmall.__name__}"))
            continue
        lam = exactness_coefficients(phi, category, ansatz)
        exact = lam is not None
        out.append(Classification(phi.name, True, True, exact,
                                  "closed, exact in ansatz" if exact else "closed, not exact in ansatz"))
    return out


def candidate_from_json(doc: Mapping) -> NatField:
    kind = doc.get("kind", "template")
    if kind == "template":
        return TemplateField.from_json(doc)
    if kind == "fixed_site":
        return FixedSiteField(tuple(doc.get("site", (0, 1, 1))), doc.get("name", "fixed-site"))
    if kind == "brst":
        return BRSTField(candidate_from_json(doc["of"]))
    raise ConfigParse(f"unknown candidate kind {kind!r}")
