"""Independent reference implementations used only by the tests.

None of these share code with the package beyond the data classes they
read: causal order is found by walking paths, Green operators by a dense
linear solve, the pairing by a Wronskian and invariant-theory counts with
sympy.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import sympy


def path_precedes(comp, p, r) -> bool:
    """``p <= r`` by explicit enumeration of causal paths on the full grid."""
    frontier = {p}
    for _ in range(r[0] - p[0]):
        frontier = {(t + 1, (x + dx) % comp.n_x) for t, x in frontier for dx in (-1, 0, 1)}
    return r[0] >= p[0] and r in frontier


def dense_green(M):
    """``(E_ret, E_adv)`` by solving ``P u = delta`` with a vanishing first/last row."""
    from lcqft.green import kg_matrix
    comp = M.single
    n, nx = len(M.sites), comp.n_x
    P = np.array(kg_matrix(M), dtype=float)
    eye = np.eye(n)
    out = []
    for rows, bc in ((range(0, n - nx), range(0, nx)), (range(nx, n), range(n - nx, n))):
        K = np.vstack([P[list(rows)], eye[list(bc)]])
        B = np.vstack([eye[list(rows)], np.zeros((nx, n))])
        out.append(np.linalg.solve(K, B))
    return out


def wronskian(u, v, t: int, n_x: int, c: int = 0):
    """``sum_x u(t+1, x) v(t, x) - u(t, x) v(t+1, x)`` for solutions on a full component."""
    return sum(u[(c, t + 1, x)] * v[(c, t, x)] - u[(c, t, x)] * v[(c, t + 1, x)]
               for x in range(n_x))


def _poly_to_sympy(poly, xs):
    return sum(sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
               * sympy.prod([x ** e for x, e in zip(xs, exps)])
               for exps, c in poly.items())


def invariant_quotient_dimension(model, max_degree: int) -> int:
    """``dim`` of (invariant polynomials of degree <= d) / (ideal(dS) in degree <= d).

    Invariants are the kernel of ``p -> (X_a p)_a`` on the monomial basis; the
    ideal part is spanned by ``m * dS/dx_i`` for monomials ``m`` keeping the
    total degree at most ``d``.
    """
    n = model.config_dim
    xs = sympy.symbols(f"x0:{n}")
    monos = [m for k in range(max_degree + 1)
             for m in itertools.combinations_with_replacement(xs, k)]
    monos = [sympy.prod(m) if m else sympy.Integer(1) for m in monos]
    coeffs = sympy.symbols(f"a0:{len(monos)}")
    p = sum(a * m for a, m in zip(coeffs, monos))
    fields = [[_poly_to_sympy(dict(Xi), xs) for Xi in X] for X in model.rho]
    eqs = []
    for X in fields:
        image = sympy.expand(sum(Xi * sympy.diff(p, x) for Xi, x in zip(X, xs)))
        eqs += sympy.Poly(image, *xs).coeffs() if image != 0 else []
    sol = sympy.linsolve(eqs, coeffs) if eqs else {tuple(coeffs)}
    (general,) = sol
    free = sorted(set().union(*[sympy.sympify(e).free_symbols for e in general]), key=str)
    invariants = [sympy.expand(p.subs(dict(zip(coeffs, general))).subs(
        {s: (1 if s == f else 0) for s in free})) for f in free]
    S = _poly_to_sympy(model.S, xs)
    grads = [sympy.diff(S, x) for x in xs]
    ideal = [sympy.expand(m * g) for m in monos for g in grads
             if g != 0 and sympy.Poly(m * g, *xs).total_degree() <= max_degree]

    def vec(expr):
        d = sympy.Poly(expr, *xs).as_dict() if expr != 0 else {}
        return d

    keys = sorted({k for e in invariants + ideal for k in vec(e)})
    mat = lambda es: sympy.Matrix([[vec(e).get(k, 0) for k in keys] for e in es]) if es else None
    r_all = mat(invariants + ideal).rank() if invariants + ideal else 0
    r_ideal = mat(ideal).rank() if ideal else 0
    return r_all - r_ideal
