"""Finite causal lattices, admissible embeddings and Cauchy slabs.

A spacetime is a finite list of components.  Each component lives on an
``n_t x n_x`` grid, periodic in space, optionally restricted to a causally
convex mask (used for diamonds).  Sites are addressed as ``(component, t, x)``;
two-element ``(t, x)`` tuples are accepted wherever the spacetime has a single
component.

The causal relation is the unit-speed cone: ``(t, x) <= (t', x')`` iff
``t' >= t`` and the circle distance between ``x`` and ``x'`` is at most
``t' - t``.  Coupling constants live on spatial edges: ``coupling[t][x]`` is
the edge between ``x`` and ``x + 1`` on row ``t``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (CausallyRelatedImages, InvalidSpacetime, NotAdmissible,
                     SiteError, SlabTooThin, SpacetimeMismatch)
from .exact import Number, q

Site = tuple[int, int, int]


def circle_distance(x: int, y: int, n: int) -> int:
    d = (x - y) % n
    return min(d, n - d)


def _grid(value, n_t: int, n_x: int, name: str) -> tuple[tuple[Number, ...], ...]:
    """Broadcast a scalar, a per-column row, or a full grid to ``n_t x n_x``."""
    if isinstance(value, (list, tuple)):
        if value and isinstance(value[0], (list, tuple)):
            if len(value) != n_t or any(len(r) != n_x for r in value):
                raise InvalidSpacetime(f"{name} grid must have shape {n_t}x{n_x}")
            return tuple(tuple(q(v) for v in row) for row in value)
        if len(value) != n_x:
            raise InvalidSpacetime(f"{name} row must have length {n_x}")
        row = tuple(q(v) for v in value)
        return (row,) * n_t
    v = q(value)
    return ((v,) * n_x,) * n_t


@dataclass(frozen=True)
class Component:
    """One connected piece of a lattice spacetime."""

    n_t: int
    n_x: int
    coupling: tuple = 1
    mass_sq: tuple = 0
    mask: frozenset | None = None

    def __post_init__(self):
        if self.n_t < 3 or self.n_x < 3:
            raise InvalidSpacetime(f"component needs n_t >= 3 and n_x >= 3, got "
                                   f"{self.n_t}x{self.n_x}")
        coupling = _grid(self.coupling, self.n_t, self.n_x, "coupling")
        mass_sq = _grid(self.mass_sq, self.n_t, self.n_x, "mass_sq")
        if any(c <= 0 for row in coupling for c in row):
            raise InvalidSpacetime("coupling must be positive on every edge")
        if any(m < 0 for row in mass_sq for m in row):
            raise InvalidSpacetime("mass_sq must be non-negative on every site")
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "mass_sq", mass_sq)
        if self.mask is not None:
            mask = frozenset((int(t), int(x) % self.n_x) for t, x in self.mask)
            if not mask:
                raise InvalidSpacetime("mask must not be empty")
            if any(not 0 <= t < self.n_t for t, _ in mask):
                raise InvalidSpacetime("mask rows out of range")
            if len(mask) == self.n_t * self.n_x:
                mask = None
            object.__setattr__(self, "mask", mask)
            if mask is not None:
                bad = _convexity_violation(self, mask)
                if bad is not None:
                    raise InvalidSpacetime(f"mask is not causally convex at {bad}")

    @property
    def is_full(self) -> bool:
        return self.mask is None

    @cached_property
    def sites(self) -> tuple[tuple[int, int], ...]:
        if self.mask is None:
            return tuple((t, x) for t in range(self.n_t) for x in range(self.n_x))
        return tuple(sorted(self.mask))

    def contains(self, t: int, x: int) -> bool:
        if not 0 <= t < self.n_t:
            return False
        return self.mask is None or (t, x % self.n_x) in self.mask

    def precedes(self, p: tuple[int, int], r: tuple[int, int]) -> bool:
        dt = r[0] - p[0]
        return dt >= 0 and circle_distance(p[1], r[1], self.n_x) <= dt

    def successors(self, t: int, x: int):
        """Sites reachable by one causal step."""
        for dx in (-1, 0, 1):
            y = (x + dx) % self.n_x
            if self.contains(t + 1, y):
                yield (t + 1, y)

    def predecessors(self, t: int, x: int):
        for dx in (-1, 0, 1):
            y = (x + dx) % self.n_x
            if self.contains(t - 1, y):
                yield (t - 1, y)

    def rows(self, t_low: int, t_high: int) -> "Component":
        return Component(t_high - t_low + 1, self.n_x,
                         self.coupling[t_low:t_high + 1],
                         self.mass_sq[t_low:t_high + 1])

    def with_coefficients(self, coupling=None, mass_sq=None) -> "Component":
        return Component(self.n_t, self.n_x,
                         self.coupling if coupling is None else coupling,
                         self.mass_sq if mass_sq is None else mass_sq,
                         self.mask)

    def to_json(self) -> dict:
        out = {"n_t": self.n_t, "n_x": self.n_x,
               "coupling": [[str(v) for v in row] for row in self.coupling],
               "mass_sq": [[str(v) for v in row] for row in self.mass_sq]}
        if self.mask is not None:
            out["mask"] = [list(s) for s in self.sites]
        return out


def _reach(comp: Component, start: Iterable[tuple[int, int]], forward: bool):
    seen = set(start)
    queue = deque(seen)
    step = comp.successors if forward else comp.predecessors
    while queue:
        s = queue.popleft()
        for nxt in step(*s):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def _convexity_violation(comp: Component, mask: frozenset):
    """A site of the full ambient grid lying causally between two mask sites."""
    full = Component(comp.n_t, comp.n_x, comp.coupling, comp.mass_sq)
    between = _reach(full, mask, True) & _reach(full, mask, False)
    extra = sorted(between - mask)
    return extra[0] if extra else None


@dataclass(frozen=True)
class LatticeSpacetime:
    """A finite globally hyperbolic lattice: a disjoint union of components."""

    components: tuple[Component, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def lattice(cls, n_t: int, n_x: int, coupling=1, mass_sq=0, mask=None):
        return cls((Component(n_t, n_x, coupling, mass_sq,
                              None if mask is None else frozenset(map(tuple, mask))),))

    @classmethod
    def empty(cls) -> "LatticeSpacetime":
        return cls(())

    @classmethod
    def from_json(cls, doc: Mapping) -> "LatticeSpacetime":
        if "components" in doc:
            return cls(tuple(_component_from_json(c) for c in doc["components"]))
        return cls((_component_from_json(doc),))

    def to_json(self) -> dict:
        return {"components": [c.to_json() for c in self.components]}

    @cached_property
    def sites(self) -> tuple[Site, ...]:
        return tuple((c, t, x) for c, comp in enumerate(self.components)
                     for t, x in comp.sites)

    @cached_property
    def index(self) -> dict[Site, int]:
        return {s: i for i, s in enumerate(self.sites)}

    def __len__(self):
        return len(self.sites)

    @property
    def is_empty(self) -> bool:
        return not self.components

    @property
    def single(self) -> Component:
        if len(self.components) != 1:
            raise SpacetimeMismatch("operation needs a single-component spacetime")
        return self.components[0]

    @property
    def n_t(self) -> int:
        return self.single.n_t

    @property
    def n_x(self) -> int:
        return self.single.n_x

    def site(self, p) -> Site:
        p = tuple(int(v) for v in p)
        if len(p) == 2:
            if len(self.components) != 1:
                raise SiteError(f"site {p} is ambiguous in a {len(self.components)}-component spacetime")
            p = (0,) + p
        if len(p) != 3:
            raise SiteError(f"malformed site {p}")
        c, t, x = p
        if not 0 <= c < len(self.components):
            raise SiteError(f"site {p} out of range")
        comp = self.components[c]
        if not (0 <= x < comp.n_x) or not comp.contains(t, x):
            raise SiteError(f"site {p} out of range")
        return p

    def precedes(self, p, r) -> bool:
        p, r = self.site(p), self.site(r)
        return p[0] == r[0] and self.components[p[0]].precedes(p[1:], r[1:])

    def causally_related(self, p, r) -> bool:
        return self.precedes(p, r) or self.precedes(r, p)

    def component_spacetime(self, c: int) -> "LatticeSpacetime":
        return LatticeSpacetime((self.components[c],))


def _component_from_json(doc: Mapping) -> Component:
    try:
        mask = doc.get("mask")
        return Component(int(doc["n_t"]), int(doc["n_x"]), doc.get("coupling", 1),
                         doc.get("mass_sq", 0),
                         None if mask is None else frozenset(tuple(s) for s in mask))
    except KeyError as exc:
        raise InvalidSpacetime(f"spacetime spec is missing field {exc}") from None


def causal_future(M: LatticeSpacetime, p) -> frozenset[Site]:
    """All sites ``r`` with ``p <= r``."""
    c, t, x = M.site(p)
    comp = M.components[c]
    return frozenset((c, s, y) for s, y in comp.sites if comp.precedes((t, x), (s, y)))


def causal_past(M: LatticeSpacetime, p) -> frozenset[Site]:
    c, t, x = M.site(p)
    comp = M.components[c]
    return frozenset((c, s, y) for s, y in comp.sites if comp.precedes((s, y), (t, x)))


def spacelike_separated(M: LatticeSpacetime, A: Iterable, B: Iterable) -> bool:
    B = [M.site(b) for b in B]
    return not any(M.causally_related(a, b) for a in A for b in B)


def disjoint_union(M1: LatticeSpacetime, M2: LatticeSpacetime) -> LatticeSpacetime:
    return LatticeSpacetime(M1.components + M2.components)


# --- embeddings -------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleEmbedding:
    """A site map ``source -> target``; ``images[i]`` is the image of ``source.sites[i]``.

    Construction does not validate; use :func:`is_admissible`.
    """

    source: LatticeSpacetime
    target: LatticeSpacetime
    images: tuple[Site, ...]

    @classmethod
    def from_map(cls, source, target, site_map: Mapping) -> "AdmissibleEmbedding":
        images = []
        for s in source.sites:
            key = s if s in site_map else s[1:]
            if key not in site_map:
                raise NotAdmissible(f"site map is not total: {s} has no image")
            images.append(tuple(site_map[key]) if len(site_map[key]) == 3
                          else (0,) + tuple(site_map[key]))
        return cls(source, target, tuple(images))

    @classmethod
    def identity(cls, M: LatticeSpacetime) -> "AdmissibleEmbedding":
        return cls(M, M, M.sites)

    def __call__(self, p) -> Site:
        return self.images[self.source.index[self.source.site(p)]]

    @cached_property
    def image(self) -> frozenset[Site]:
        return frozenset(self.images)

    def then(self, after: "AdmissibleEmbedding") -> "AdmissibleEmbedding":
        """Composition ``after ∘ self``."""
        if after.source != self.target:
            raise SpacetimeMismatch("embeddings are not composable")
        return AdmissibleEmbedding(self.source, after.target,
                                   tuple(after(s) for s in self.images))

    def as_dict(self) -> dict[Site, Site]:
        return dict(zip(self.source.sites, self.images))


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    clause: str | None = None
    witness: tuple | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


CLAUSES = ("total", "injective", "orientation", "isometry", "causal_convexity",
           "causal_order")


def is_admissible(chi: AdmissibleEmbedding) -> AdmissibilityReport:
    """Check every admissibility clause in the order of ``CLAUSES``.

    ``orientation`` requires each component to be mapped by a rigid
    translation that keeps spatial neighbours adjacent in the same cyclic
    order (time orientation comes for free); ``isometry`` requires equal
    coefficients on every site and every edge the stencil reads.
    """
    S, T = chi.source, chi.target
    if len(chi.images) != len(S.sites):
        return AdmissibilityReport(False, "total", None, "site map is not total")
    for s, img in zip(S.sites, chi.images):
        try:
            T.site(img)
        except SiteError:
            return AdmissibilityReport(False, "total", (s, img), f"image {img} of {s} is not a target site")
    seen: dict[Site, Site] = {}
    for s, img in zip(S.sites, chi.images):
        if img in seen:
            return AdmissibilityReport(False, "injective", (seen[img], s),
                                       f"{seen[img]} and {s} share image {img}")
        seen[img] = s

    f = chi.as_dict()
    for c, comp in enumerate(S.components):
        first = comp.sites[0]
        c_img, t_img, x_img = f[(c,) + first]
        tcomp = T.components[c_img]
        dt, dx = t_img - first[0], x_img - first[1]
        for t, x in comp.sites:
            expect = (c_img, t + dt, (x + dx) % tcomp.n_x)
            if f[(c, t, x)] != expect:
                return AdmissibilityReport(False, "orientation", ((c, t, x), f[(c, t, x)]),
                                           "component is not mapped by a rigid translation")
        for t, x in comp.sites:
            if comp.contains(t, x + 1):
                nb = f[(c, t, (x + 1) % comp.n_x)]
                if nb != (c_img, t + dt, (x + dx + 1) % tcomp.n_x):
                    return AdmissibilityReport(False, "orientation",
                                               ((c, t, x), (c, t, (x + 1) % comp.n_x)),
                                               "spatial neighbours are not kept in cyclic order")
        for t, x in comp.sites:
            tt, tx = t + dt, (x + dx) % tcomp.n_x
            if comp.mass_sq[t][x] != tcomp.mass_sq[tt][tx]:
                return AdmissibilityReport(False, "isometry", ((c, t, x), (c_img, tt, tx)),
                                           "mass_sq differs under the site map")
            for ex in (x - 1, x):
                exs = ex % comp.n_x
                if comp.coupling[t][exs] != tcomp.coupling[tt][(exs + dx) % tcomp.n_x]:
                    return AdmissibilityReport(False, "isometry", ((c, t, exs), (c_img, tt, (exs + dx) % tcomp.n_x)),
                                               "coupling differs under the site map")

    bad = _image_convexity_witness(T, chi.image)
    if bad is not None:
        return AdmissibilityReport(False, "causal_convexity", bad,
                                   f"causal path from {bad[0]} to {bad[2]} leaves the image at {bad[1]}")

    src = S.sites
    for i, p in enumerate(src):
        fp = chi.images[i]
        for j, r in enumerate(src):
            if i == j:
                continue
            if S.precedes(p, r) != T.precedes(fp, chi.images[j]):
                return AdmissibilityReport(False, "causal_order", (p, r),
                                           "causal relation not preserved in both directions")
    return AdmissibilityReport(True)


def _image_convexity_witness(T: LatticeSpacetime, image: frozenset[Site]):
    """``(p, r, q)`` with ``p <= r <= q``, ``p, q`` in the image and ``r`` outside."""
    for c, comp in enumerate(T.components):
        img = {s[1:] for s in image if s[0] == c}
        if not img:
            continue
        fut = _reach(comp, img, True)
        past = _reach(comp, img, False)
        outside = sorted((fut & past) - img)
        if outside:
            r = outside[0]
            p = next(s for s in sorted(img) if comp.precedes(s, r))
            q_ = next(s for s in sorted(img) if comp.precedes(r, s))
            return ((c,) + p, (c,) + r, (c,) + q_)
    return None


def require_admissible(chi: AdmissibleEmbedding) -> None:
    rep = is_admissible(chi)
    if not rep:
        raise NotAdmissible(f"{rep.clause}: {rep.message} (witness {rep.witness})")


def injections(M1: LatticeSpacetime, M2: LatticeSpacetime):
    """The canonical injections of ``M1`` and ``M2`` into their disjoint union."""
    U = disjoint_union(M1, M2)
    k = len(M1.components)
    i1 = AdmissibleEmbedding(M1, U, M1.sites)
    i2 = AdmissibleEmbedding(M2, U, tuple((c + k, t, x) for c, t, x in M2.sites))
    return i1, i2


def glue_embeddings(chi1: AdmissibleEmbedding, chi2: AdmissibleEmbedding) -> AdmissibleEmbedding:
    """The piecewise map from ``M1 ⊔ M2`` agreeing with ``chi1`` and ``chi2``."""
    if chi1.target != chi2.target:
        raise SpacetimeMismatch("embeddings have different targets")
    T = chi1.target
    for p in chi1.images:
        for r in chi2.images:
            if T.causally_related(p, r):
                raise CausallyRelatedImages(f"{p} and {r} are causally related")
    return AdmissibleEmbedding(disjoint_union(chi1.source, chi2.source), T,
                               chi1.images + chi2.images)


# --- named constructors -----------------------------------------------------

def slab(M: LatticeSpacetime, t_low: int, t_high: int, component: int = 0):
    """Rows ``t_low..t_high`` of a full component, as a spacetime plus its inclusion."""
    comp = M.components[component]
    if not comp.is_full:
        raise InvalidSpacetime("slabs are only defined on full components")
    if not 0 <= t_low <= t_high < comp.n_t:
        raise InvalidSpacetime(f"rows {t_low}..{t_high} out of range")
    N = LatticeSpacetime((comp.rows(t_low, t_high),))
    images = tuple((component, t + t_low, x) for _, t, x in N.sites)
    return N, AdmissibleEmbedding(N, M, images)


def diamond(M: LatticeSpacetime, p, r):
    """The causal diamond ``J+(p) ∩ J-(r)`` as a masked spacetime plus its inclusion."""
    c, t0, x0 = M.site(p)
    c2, t1, x1 = M.site(r)
    comp = M.components[c]
    if c != c2 or not comp.precedes((t0, x0), (t1, x1)):
        raise InvalidSpacetime(f"{p} does not causally precede {r}")
    if t1 - t0 < 2:
        raise InvalidSpacetime("a diamond needs at least three rows")
    mask = frozenset((t - t0, x) for t, x in comp.sites
                     if comp.precedes((t0, x0), (t, x)) and comp.precedes((t, x), (t1, x1)))
    N = LatticeSpacetime((Component(t1 - t0 + 1, comp.n_x,
                                    comp.coupling[t0:t1 + 1], comp.mass_sq[t0:t1 + 1], mask),))
    images = tuple((c, t + t0, x) for _, t, x in N.sites)
    return N, AdmissibleEmbedding(N, M, images)


def translate(M: LatticeSpacetime, dx: int, component: int | None = None) -> AdmissibleEmbedding:
    """Spatial translation by ``dx`` (of one component, or of all)."""
    images = []
    for c, t, x in M.sites:
        n = M.components[c].n_x
        shift = dx if component is None or component == c else 0
        images.append((c, t, (x + shift) % n))
    return AdmissibleEmbedding(M, M, tuple(images))


def embedding_from_json(doc: Mapping, spacetimes: Mapping[str, LatticeSpacetime]):
    """Build ``(source, embedding)`` from a named-constructor or explicit-map document."""
    kind = doc.get("kind", "map")
    target = spacetimes[doc.get("target", "M")]
    if kind == "slab":
        return slab(target, int(doc["t_low"]), int(doc["t_high"]), int(doc.get("component", 0)))
    if kind == "diamond":
        return diamond(target, tuple(doc["bottom"]), tuple(doc["top"]))
    if kind == "translate":
        chi = translate(target, int(doc["dx"]), doc.get("component"))
        return target, chi
    if kind == "map":
        source = spacetimes[doc["source"]]
        mapping = {tuple(k): tuple(v) for k, v in doc["site_map"]}
        return source, AdmissibleEmbedding.from_map(source, target, mapping)
    raise NotAdmissible(f"unknown embedding constructor {kind!r}")


# --- Cauchy slabs -----------------------------------------------------------

@dataclass(frozen=True)
class CauchySlab:
    spacetime: LatticeSpacetime
    t_low: int
    t_high: int
    component: int = 0

    def __post_init__(self):
        comp = self.spacetime.components[self.component]
        if not comp.is_full:
            raise InvalidSpacetime("Cauchy slabs need a full component")
        if self.t_high < self.t_low + 1:
            raise SlabTooThin(f"slab {self.t_low}..{self.t_high} has fewer than two rows")
        if not 0 <= self.t_low or self.t_high >= comp.n_t:
            raise InvalidSpacetime(f"slab rows {self.t_low}..{self.t_high} out of range")

    @property
    def rows(self) -> range:
        return range(self.t_low, self.t_high + 1)

    def sites(self) -> frozenset[Site]:
        n_x = self.spacetime.components[self.component].n_x
        return frozenset((self.component, t, x) for t in self.rows for x in range(n_x))

    def contains_cauchy_surface(self) -> bool:
        """Every inextendible causal path meets the slab (checked by search)."""
        comp = self.spacetime.components[self.component]
        blocked = {s[1:] for s in self.sites()}
        start = [(0, x) for x in range(comp.n_x) if (0, x) not in blocked]
        seen = set(start)
        queue = deque(start)
        while queue:
            s = queue.popleft()
            if s[0] == comp.n_t - 1:
                return False
            for nxt in comp.successors(*s):
                if nxt not in blocked and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return True

    def neighbourhood(self, margin: int) -> "CauchySlab":
        comp = self.spacetime.components[self.component]
        return CauchySlab(self.spacetime, max(0, self.t_low - margin),
                          min(comp.n_t - 1, self.t_high + margin), self.component)
