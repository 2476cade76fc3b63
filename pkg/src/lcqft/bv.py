"""Minimal-sector BV algebra of a finite-dimensional gauge model.

Generators and ghost numbers:

    x_i   configuration coordinates      0   even
    x‡_i  antifields                    -1   odd
    c^a   ghosts                        +1   odd
    b_a   antifields of ghosts          -2   even

A monomial is stored as ``(b, x, xd, c)``: ``b`` a sorted tuple of indices
with repetition, ``x`` an exponent vector, ``xd`` and ``c`` strictly
increasing index tuples.  It stands for the ordered product
``b... x... x‡... c...``.

Structure constants follow ``[e_b, e_c] = f^a_{bc} e_a`` and ``rho`` must
satisfy ``[X_b, X_c] = f^a_{bc} X_a`` for the vector fields ``X_a = rho_a^i d_i``.
The differentials are odd derivations acting from the left:

    gamma x_i   = rho_a^i c^a
    gamma c^a   = -1/2 f^a_{bc} c^b c^c
    gamma x‡_i  = (d_i rho_a^j) x‡_j c^a
    gamma b_a   = f^d_{ba} b_d c^b
    delta x‡_i  = d_i S
    delta b_a   = rho_a^i x‡_i
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigParse, ModelMismatch, TruncationError
from .exact import independent_rows, nullspace, q, rank

Poly = dict  # exponent tuple -> rational

# --- polynomials ------------------------------------------------------------


def poly_add(*ps: Poly) -> Poly:
    out: dict = {}
    for p in ps:
        for k, v in p.items():
            out[k] = out.get(k, 0) + v
    return {k: q(v) for k, v in out.items() if v}


def poly_scale(p: Poly, c) -> Poly:
    return {k: q(v * c) for k, v in p.items() if v * c}


def poly_mul(p: Poly, r: Poly) -> Poly:
    out: dict = {}
    for k1, v1 in p.items():
        for k2, v2 in r.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            out[k] = out.get(k, 0) + v1 * v2
    return {k: q(v) for k, v in out.items() if v}


def poly_diff(p: Poly, i: int) -> Poly:
    out = {}
    for k, v in p.items():
        if k[i]:
            kk = list(k)
            kk[i] -= 1
            out[tuple(kk)] = q(v * k[i])
    return out


def poly_degree(p: Poly) -> int:
    return max((sum(k) for k in p), default=0)


def monomials_upto(n: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``<= d``, graded then lexicographic."""
    out = []
    for deg in range(d + 1):
        for combo in itertools.combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def vector_field_apply(X: Sequence[Poly], p: Poly) -> Poly:
    return poly_add(*(poly_mul(Xi, poly_diff(p, i)) for i, Xi in enumerate(X)))


def vector_field_bracket(X: Sequence[Poly], Y: Sequence[Poly]) -> list[Poly]:
    return [poly_add(vector_field_apply(X, Yi), poly_scale(vector_field_apply(Y, Xi), -1))
            for Xi, Yi in zip(X, Y)]


def _poly_from_json(n: int, terms) -> Poly:
    out: dict = {}
    for item in terms:
        exps, coef = item
        if len(exps) != n:
            raise ConfigParse(f"exponent vector {exps} does not have length {n}")
        k = tuple(int(e) for e in exps)
        out[k] = out.get(k, 0) + q(Fraction(str(coef)))
    return {k: v for k, v in out.items() if v}


def _poly_to_json(p: Poly):
    return [[list(k), str(v)] for k, v in sorted(p.items())]


# --- models -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GaugeModel:
    """``config_dim`` coordinates, a Lie algebra of dimension ``algebra_dim`` and an action."""

    name: str
    config_dim: int
    algebra_dim: int
    structure: tuple  # structure[a][b][c] = f^a_{bc}
    rho: tuple        # rho[a][i] = polynomial component X_a^i
    action: tuple     # sorted (exponents, coefficient) pairs of S

    @classmethod
    def build(cls, name: str, config_dim: int, structure, rho: Sequence[Sequence[Poly]],
              action: Poly) -> "GaugeModel":
        m = len(rho)
        f = [[[q(structure[a][b][c]) if structure else 0 for c in range(m)]
              for b in range(m)] for a in range(m)]
        rho_t = tuple(tuple(tuple(sorted({k: q(v) for k, v in Xi.items() if v}.items()))
                            for Xi in X) for X in rho)
        for X in rho:
            if len(X) != config_dim:
                raise ConfigParse("each rho vector field needs config_dim components")
        return cls(name, config_dim, m, tuple(tuple(map(tuple, fa)) for fa in f), rho_t,
                   tuple(sorted({k: q(v) for k, v in action.items() if v}.items())))

    @classmethod
    def linear(cls, name: str, config_dim: int, structure, matrices, action: Poly) -> "GaugeModel":
        """Model with ``X_a^i = sum_j matrices[a][i][j] x_j``."""
        n = config_dim
        unit = [tuple(1 if k == j else 0 for k in range(n)) for j in range(n)]
        rho = []
        for T in matrices:
            rho.append([{unit[j]: q(Fraction(str(T[i][j]))) for j in range(n) if T[i][j]}
                        for i in range(n)])
        return cls.build(name, n, structure, rho, action)

    # JSON ------------------------------------------------------------------
    @classmethod
    def from_json(cls, doc: Mapping) -> "GaugeModel":
        try:
            n = int(doc["config_dim"])
            rho_doc = doc["rho"]
            if "matrices" in rho_doc:
                m = len(rho_doc["matrices"])
            else:
                m = len(rho_doc["vector_fields"])
            f = [[[0] * m for _ in range(m)] for _ in range(m)]
            for a, b, c, v in doc.get("structure_constants", []):
                f[int(a)][int(b)][int(c)] = q(Fraction(str(v)))
            action = _poly_from_json(n, doc.get("action_S", []))
            name = str(doc.get("name", "model"))
            if "matrices" in rho_doc:
                return cls.linear(name, n, f, rho_doc["matrices"], action)
            rho = [[_poly_from_json(n, comp) for comp in X] for X in rho_doc["vector_fields"]]
            return cls.build(name, n, f, rho, action)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            if isinstance(exc, ConfigParse):
                raise
            raise ConfigParse(f"malformed gauge model: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "GaugeModel":
        text = Path(path).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigParse(f"{path}:{exc.lineno}: {exc.msg}") from exc
        return cls.from_json(doc)

    def to_json(self) -> dict:
        m = self.algebra_dim
        sc = [[a, b, c, str(self.structure[a][b][c])] for a in range(m) for b in range(m)
              for c in range(m) if self.structure[a][b][c]]
        return {"name": self.name, "config_dim": self.config_dim, "structure_constants": sc,
                "rho": {"vector_fields": [[_poly_to_json(dict(Xi)) for Xi in X] for X in self.rho]},
                "action_S": _poly_to_json(self.S)}

    # data ------------------------------------------------------------------
    @cached_property
    def S(self) -> Poly:
        return dict(self.action)

    @cached_property
    def fields(self) -> list[list[Poly]]:
        return [[dict(Xi) for Xi in X] for X in self.rho]

    @cached_property
    def grad_S(self) -> list[Poly]:
        return [poly_diff(self.S, i) for i in range(self.config_dim)]

    def f(self, a: int, b: int, c: int):
        return self.structure[a][b][c]

    # invariants ------------------------------------------------------------
    def jacobi_violations(self) -> list[tuple]:
        m = self.algebra_dim
        bad = []
        for a, b, c, d in itertools.product(range(m), repeat=4):
            # ([[e_a,e_b],e_c] + cyclic) along e_d
            tot = 0
            for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                tot += sum(self.f(e, x, y) * self.f(d, e, z) for e in range(m))
            if tot:
                bad.append((a, b, c, d))
        return bad

    def antisymmetry_violations(self) -> list[tuple]:
        m = self.algebra_dim
        return [(a, b, c) for a, b, c in itertools.product(range(m), repeat=3)
                if self.f(a, b, c) != -self.f(a, c, b)]

    def morphism_violations(self) -> list[tuple]:
        """Pairs ``(b, c)`` with ``[X_b, X_c] != f^a_{bc} X_a``."""
        m, n = self.algebra_dim, self.config_dim
        X = self.fields
        bad = []
        for b in range(m):
            for c in range(m):
                lhs = vector_field_bracket(X[b], X[c])
                rhs = [poly_add(*(poly_scale(X[a][i], self.f(a, b, c)) for a in range(m)))
                       for i in range(n)]
                if any(poly_add(l, poly_scale(r, -1)) for l, r in zip(lhs, rhs)):
                    bad.append((b, c))
        return bad

    def invariance_violations(self) -> list[tuple[int, Poly]]:
        """``(a, X_a S)`` for every generator that does not leave ``S`` invariant."""
        out = []
        for a, X in enumerate(self.fields):
            v = vector_field_apply(X, self.S)
            if v:
                out.append((a, v))
        return out

    def diagnostics(self) -> dict:
        return {"jacobi": self.jacobi_violations(),
                "antisymmetry": self.antisymmetry_violations(),
                "morphism": self.morphism_violations(),
                "invariance": [a for a, _ in self.invariance_violations()]}


# --- bundled models ---------------------------------------------------------

def _eps(a, b, c) -> int:
    return (a - b) * (b - c) * (c - a) // 2


def mexican_hat(n: int) -> Poly:
    """``1/4 (|x|^2 - 1)^2`` on ``R^n``."""
    r2 = {tuple(2 if k == i else 0 for k in range(n)): 1 for i in range(n)}
    shifted = poly_add(r2, {(0,) * n: -1})
    return poly_scale(poly_mul(shifted, shifted), Fraction(1, 4))


def so3_model(action: Poly | None = None, name: str = "so3") -> GaugeModel:
    """Rotations of ``R^3`` with ``f^a_{bc} = eps_{abc}`` and ``(T_a)_{ij} = eps_{aij}``."""
    f = [[[_eps(a, b, c) for c in range(3)] for b in range(3)] for a in range(3)]
    T = [[[_eps(a, i, j) for j in range(3)] for i in range(3)] for a in range(3)]
    return GaugeModel.linear(name, 3, f, T, mexican_hat(3) if action is None else action)


def abelian_model() -> GaugeModel:
    """Two commuting plane rotations on ``R^4``."""
    T1 = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    T2 = [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    hat = mexican_hat(2)
    S = {k + (0, 0): v for k, v in hat.items()}
    S = poly_add(S, {(0, 0, 2, 0): Fraction(1, 2), (0, 0, 0, 2): Fraction(1, 2)})
    return GaugeModel.linear("abelian", 4, None, [T1, T2], S)


def trivial_model(config_dim: int, action: Poly | None = None) -> GaugeModel:
    """No gauge symmetry at all."""
    return GaugeModel.build("trivial", config_dim, None, [], action or {})


def sabotage_model() -> GaugeModel:
    """so(3) with ``S + x_1``, which is not rotation invariant."""
    S = poly_add(mexican_hat(3), {(1, 0, 0): 1})
    return so3_model(S, name="so3-sabotage")


# --- graded elements --------------------------------------------------------

Key = tuple  # (b, x, xd, c)


def _merge_odd(a: tuple, b: tuple):
    """Sorted concatenation of two strictly increasing tuples with its sign, or ``None``."""
    if set(a) & set(b):
        return None
    inv = sum(1 for i in a for j in b if i > j)
    return tuple(sorted(a + b)), -1 if inv % 2 else 1


def _key_mul(k1: Key, k2: Key):
    b1, x1, d1, c1 = k1
    b2, x2, d2, c2 = k2
    sign = -1 if (len(c1) * len(d2)) % 2 else 1
    md = _merge_odd(d1, d2)
    if md is None:
        return None
    mc = _merge_odd(c1, c2)
    if mc is None:
        return None
    key = (tuple(sorted(b1 + b2)), tuple(a + b for a, b in zip(x1, x2)), md[0], mc[0])
    return key, sign * md[1] * mc[1]


def key_ghost(k: Key) -> int:
    return len(k[3]) - len(k[2]) - 2 * len(k[0])


def key_parity(k: Key) -> int:
    return (len(k[2]) + len(k[3])) % 2


class GradedElement:
    """A finite sum of canonical monomials with rational coefficients."""

    __slots__ = ("model", "terms")

    def __init__(self, model: GaugeModel, terms: Mapping[Key, object] = ()):
        self.model = model
        self.terms = {k: q(v) for k, v in dict(terms).items() if v}

    # constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, model):
        return cls(model)

    @classmethod
    def one(cls, model, coef=1):
        return cls(model, {cls._key(model): coef})

    @staticmethod
    def _key(model, b=(), x=None, xd=(), c=()):
        return (tuple(b), tuple(x) if x is not None else (0,) * model.config_dim,
                tuple(xd), tuple(c))

    @classmethod
    def x(cls, model, i):
        e = [0] * model.config_dim
        e[i] = 1
        return cls(model, {cls._key(model, x=e): 1})

    @classmethod
    def xd(cls, model, i):
        return cls(model, {cls._key(model, xd=(i,)): 1})

    @classmethod
    def c(cls, model, a):
        return cls(model, {cls._key(model, c=(a,)): 1})

    @classmethod
    def b(cls, model, a):
        return cls(model, {cls._key(model, b=(a,)): 1})

    @classmethod
    def poly(cls, model, p: Poly):
        return cls(model, {cls._key(model, x=k): v for k, v in p.items()})

    # arithmetic ------------------------------------------------------------
    def _same(self, other):
        if other.model is not self.model and other.model.to_json() != self.model.to_json():
            raise ModelMismatch("elements belong to different gauge models")

    def __add__(self, other):
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return GradedElement(self.model, out)

    def __neg__(self):
        return GradedElement(self.model, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return GradedElement(self.model, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GradedElement):
            return graded_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    # grading ---------------------------------------------------------------
    def ghost_numbers(self) -> set[int]:
        return {key_ghost(k) for k in self.terms}

    def parities(self) -> set[int]:
        return {key_parity(k) for k in self.terms}

    @property
    def parity(self) -> int:
        ps = self.parities()
        if len(ps) > 1:
            raise ValueError("element is not of homogeneous parity")
        return ps.pop() if ps else 0

    def ghost_component(self, g: int) -> "GradedElement":
        return GradedElement(self.model, {k: v for k, v in self.terms.items() if key_ghost(k) == g})

    def x_degree(self) -> int:
        return max((sum(k[1]) for k in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*{format_key(k)}" for k, v in sorted(self.terms.items()))


def format_key(k: Key) -> str:
    b, x, d, c = k
    parts = [f"b{a}" for a in b]
    for i, e in enumerate(x):
        if e:
            parts.append(f"x{i}" + (f"^{e}" if e > 1 else ""))
    parts += [f"xd{i}" for i in d] + [f"c{a}" for a in c]
    return "*".join(parts) or "1"


def graded_multiply(u: GradedElement, v: GradedElement) -> GradedElement:
    u._same(v)
    out: dict = {}
    for k1, a in u.terms.items():
        for k2, b in v.terms.items():
            r = _key_mul(k1, k2)
            if r is None:
                continue
            k, s = r
            out[k] = out.get(k, 0) + s * a * b
    return GradedElement(u.model, out)


# --- differentials ----------------------------------------------------------

class _Differential:
    """An odd derivation specified by its values on generators."""

    def __init__(self, model: GaugeModel, on_x, on_xd, on_c, on_b):
        self.model = model
        self._gen = {"x": on_x, "xd": on_xd, "c": on_c, "b": on_b}
        self._cache: dict[Key, dict] = {}

    def _mono(self, key: Key) -> dict:
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        model = self.model
        b, x, d, c = key
        out = GradedElement(model)
        odd_part = GradedElement(model, {GradedElement._key(model, xd=d, c=c): 1})
        # even generators: D(g^e) = e g^(e-1) D(g), placed before the odd part
        for a in sorted(set(b)):
            e = b.count(a)
            rest = list(b)
            rest.remove(a)
            pre = GradedElement(model, {GradedElement._key(model, b=rest, x=x): e})
            out = out + pre * self._gen["b"][a] * odd_part
        for i, e in enumerate(x):
            if e:
                xx = list(x)
                xx[i] -= 1
                pre = GradedElement(model, {GradedElement._key(model, b=b, x=xx): e})
                out = out + pre * self._gen["x"][i] * odd_part
        even = GradedElement(model, {GradedElement._key(model, b=b, x=x): 1})
        atoms = [("xd", i) for i in d] + [("c", a) for a in c]
        for pos, (kind, idx) in enumerate(atoms):
            left = GradedElement(model, {GradedElement._key(
                model, xd=[i for k_, i in atoms[:pos] if k_ == "xd"],
                c=[i for k_, i in atoms[:pos] if k_ == "c"]): -1 if pos % 2 else 1})
            right = GradedElement(model, {GradedElement._key(
                model, xd=[i for k_, i in atoms[pos + 1:] if k_ == "xd"],
                c=[i for k_, i in atoms[pos + 1:] if k_ == "c"]): 1})
            out = out + even * left * self._gen[kind][idx] * right
        self._cache[key] = out.terms
        return out.terms

    def __call__(self, u: GradedElement) -> GradedElement:
        out: dict = {}
        for k, v in u.terms.items():
            for k2, w in self._mono(k).items():
                out[k2] = out.get(k2, 0) + v * w
        return GradedElement(self.model, out)


def _gamma_generators(model: GaugeModel):
    n, m = model.config_dim, model.algebra_dim
    E = GradedElement
    X = model.fields
    on_x = [sum((E.poly(model, X[a][i]) * E.c(model, a) for a in range(m)), E(model))
            for i in range(n)]
    on_c = []
    for a in range(m):
        acc = E(model)
        for b in range(m):
            for c in range(m):
                f = model.f(a, b, c)
                if f:
                    acc = acc + (E.c(model, b) * E.c(model, c)).scale(Fraction(-f) / 2)
        on_c.append(acc)
    on_xd = []
    for i in range(n):
        acc = E(model)
        for a in range(m):
            for j in range(n):
                dp = poly_diff(X[a][j], i)
                if dp:
                    acc = acc + E.poly(model, dp) * E.xd(model, j) * E.c(model, a)
        on_xd.append(acc)
    on_b = []
    for a in range(m):
        acc = E(model)
        for b in range(m):
            for d in range(m):
                f = model.f(d, b, a)
                if f:
                    acc = acc + (E.b(model, d) * E.c(model, b)).scale(f)
        on_b.append(acc)
    return on_x, on_xd, on_c, on_b


def _delta_generators(model: GaugeModel):
    n, m = model.config_dim, model.algebra_dim
    E = GradedElement
    on_x = [E(model)] * n
    on_c = [E(model)] * m
    on_xd = [E.poly(model, model.grad_S[i]) for i in range(n)]
    on_b = [sum((E.poly(model, model.fields[a][i]) * E.xd(model, i) for i in range(n)), E(model))
            for a in range(m)]
    return on_x, on_xd, on_c, on_b


_diff_cache: dict[tuple[int, str], _Differential] = {}


def _differential(model: GaugeModel, which: str) -> _Differential:
    key = (id(model), which)
    d = _diff_cache.get(key)
    if d is None or d.model is not model:
        if which == "gamma":
            d = _Differential(model, *_gamma_generators(model))
        elif which == "delta":
            d = _Differential(model, *_delta_generators(model))
        else:
            g, dl = _gamma_generators(model), _delta_generators(model)
            d = _Differential(model, *[[a + b for a, b in zip(x, y)] for x, y in zip(g, dl)])
        _diff_cache[key] = d
    return d


def apply_gamma(u: GradedElement) -> GradedElement:
    return _differential(u.model, "gamma")(u)


def apply_delta(u: GradedElement) -> GradedElement:
    return _differential(u.model, "delta")(u)


def apply_s(u: GradedElement) -> GradedElement:
    return _differential(u.model, "s")(u)


# --- sampling and diagnostics -----------------------------------------------

def generator_list(model: GaugeModel) -> list[GradedElement]:
    E = GradedElement
    return ([E.x(model, i) for i in range(model.config_dim)]
            + [E.xd(model, i) for i in range(model.config_dim)]
            + [E.c(model, a) for a in range(model.algebra_dim)]
            + [E.b(model, a) for a in range(model.algebra_dim)])


def random_element(model: GaugeModel, rng: random.Random, max_degree: int = 3,
                   terms: int = 4) -> GradedElement:
    """A random sum of products of at most ``max_degree`` generators."""
    gens = generator_list(model)
    out = GradedElement(model)
    for _ in range(terms):
        k = rng.randint(0, max_degree)
        mono = GradedElement.one(model, Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
        for _ in range(k):
            mono = mono * rng.choice(gens)
        out = out + mono
    return out


@dataclass(frozen=True)
class NilpotencyReport:
    ok: bool
    witness: GradedElement | None
    image: GradedElement | None
    invariance: tuple  # generators a with X_a S != 0

    def summary(self) -> str:
        if self.ok:
            return "s^2 = 0 on all sampled elements"
        return (f"s^2 {self.witness!r} = {self.image!r}; action not invariant under "
                f"generators {list(self.invariance)}")


def check_nilpotency(model: GaugeModel, elements: Iterable[GradedElement]) -> NilpotencyReport:
    """First element with ``s^2 u != 0``, plus the invariance diagnostic."""
    inv = tuple(a for a, _ in model.invariance_violations())
    for u in list(generator_list(model)) + list(elements):
        img = apply_s(apply_s(u))
        if not img.is_zero():
            return NilpotencyReport(False, u, img, inv)
    return NilpotencyReport(True, None, None, inv)


# --- cohomology -------------------------------------------------------------

def _odd_subsets(size: int, k: int):
    return list(itertools.combinations(range(size), k))


def cochain_basis(model: GaugeModel, ghost: int, max_degree: int) -> list[Key]:
    """Canonical monomials of ghost number ``ghost`` and ``x``-degree at most ``max_degree``."""
    n, m = model.config_dim, model.algebra_dim
    xs = monomials_upto(n, max_degree)
    out = []
    for nc in range(m + 1):
        for nd in range(n + 1):
            rest = nc - nd - ghost
            if rest < 0 or rest % 2:
                continue
            nb = rest // 2
            if nb and not m:
                continue
            for bs in itertools.combinations_with_replacement(range(m), nb):
                for d in _odd_subsets(n, nd):
                    for c in _odd_subsets(m, nc):
                        for x in xs:
                            out.append((bs, x, d, c))
    return out


@dataclass(frozen=True)
class CohomologyResult:
    ghost_number: int
    max_degree: int
    dimension: int
    cocycle_dimension: int
    coboundary_rank: int
    representatives: tuple[GradedElement, ...]
    preimage_degree: int


def cohomology(model: GaugeModel, ghost_number: int, max_degree: int,
               preimage_degree: int | None = None) -> CohomologyResult:
    """``H^k`` of ``s`` in the window of ``x``-degree ``<= max_degree``.

    Cocycles are elements of the window killed by ``s``.  Coboundaries are
    ``s``-images of cochains of ``x``-degree ``<= preimage_degree`` (default
    ``max_degree``) that land inside the window.
    """
    k, d = ghost_number, max_degree
    pd = d if preimage_degree is None else preimage_degree
    if pd < 0 or d < 0:
        raise TruncationError("degree windows must be non-negative")
    s = _differential(model, "s")
    basis = cochain_basis(model, k, d)
    if not basis:
        return CohomologyResult(k, d, 0, 0, 0, (), pd)
    # cocycles
    images = [s._mono(key) for key in basis]
    keys = sorted({kk for img in images for kk in img})
    col = {kk: i for i, kk in enumerate(keys)}
    rows = [[0] * len(basis) for _ in keys]
    for j, img in enumerate(images):
        for kk, v in img.items():
            rows[col[kk]][j] = v
    Z = nullspace(rows, len(basis)) if keys else [[1 if i == j else 0 for i in range(len(basis))]
                                                   for j in range(len(basis))]
    # coboundaries landing in the window
    pre = cochain_basis(model, k - 1, pd)
    inside = {kk: i for i, kk in enumerate(basis)}
    B_vecs: list[list] = []
    if pre:
        pim = [s._mono(key) for key in pre]
        out_keys = sorted({kk for img in pim for kk in img if kk not in inside})
        ocol = {kk: i for i, kk in enumerate(out_keys)}
        if out_keys:
            orow = [[0] * len(pre) for _ in out_keys]
            for j, img in enumerate(pim):
                for kk, v in img.items():
                    if kk in ocol:
                        orow[ocol[kk]][j] = v
            combos = nullspace(orow, len(pre))
        else:
            combos = [[1 if i == j else 0 for i in range(len(pre))] for j in range(len(pre))]
        for cmb in combos:
            vec = [0] * len(basis)
            for j, w in enumerate(cmb):
                if w:
                    for kk, v in pim[j].items():
                        if kk in inside:
                            vec[inside[kk]] += w * v
            vec = [q(v) for v in vec]
            if any(vec):
                B_vecs.append(vec)
    rB = rank(B_vecs) if B_vecs else 0
    # representatives: extend a basis of B by cocycles
    chosen = independent_rows(B_vecs + Z)
    reps = []
    for idx in chosen:
        if idx >= len(B_vecs):
            z = Z[idx - len(B_vecs)]
            reps.append(GradedElement(model, {basis[j]: v for j, v in enumerate(z) if v}))
    if len(reps) != len(Z) - rB:
        raise TruncationError("coboundaries are not contained in the cocycles; s^2 != 0?")
    return CohomologyResult(k, d, len(reps), len(Z), rB, tuple(reps), pd)
