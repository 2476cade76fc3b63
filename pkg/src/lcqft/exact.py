"""Exact scalars and dense rational linear algebra.

Gaussian rationals (``Qi``) carry the coefficients of observables, since
commutators introduce a factor of ``i``.  The elimination routines work on
lists of lists of ``Fraction``/``int`` and never round.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

Number = int | Fraction


def q(value) -> Number:
    """Coerce to an exact rational, demoting integral values to ``int``.

    Keeping integral entries as ``int`` makes the Green-operator recursion
    several times faster when all coefficients are integers.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not lattice coefficients")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        value = Fraction(value).limit_denominator(10**12)
    elif isinstance(value, str):
        value = Fraction(value)
    elif not isinstance(value, Fraction):
        if isinstance(value, Rational):
            value = Fraction(value.numerator, value.denominator)
        else:
            raise TypeError(f"cannot coerce {value!r} to a rational")
    return value.numerator if value.denominator == 1 else value


class Qi:
    """A Gaussian rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re: Number = 0, im: Number = 0):
        self.re = q(re)
        self.im = q(im)

    @staticmethod
    def coerce(value) -> "Qi":
        if isinstance(value, Qi):
            return value
        if isinstance(value, complex):
            return Qi(value.real, value.imag)
        return Qi(value, 0)

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Qi)):
            other = Qi.coerce(other)
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        other = Qi.coerce(other)
        return Qi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = Qi.coerce(other)
        return Qi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return Qi.coerce(other) - self

    def __neg__(self):
        return Qi(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Qi(self.re * other, self.im * other)
        other = Qi.coerce(other)
        return Qi(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Qi.coerce(other)
        den = other.re * other.re + other.im * other.im
        num = self * other.conjugate()
        return Qi(Fraction(num.re) / den, Fraction(num.im) / den)

    def conjugate(self) -> "Qi":
        return Qi(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        if self.im == 0:
            return f"Qi({self.re})"
        return f"Qi({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


I = Qi(0, 1)


def rref(rows: Sequence[Sequence[Number]], ncols: int | None = None):
    """Reduced row echelon form.

    Returns ``(reduced_rows, pivot_columns)``; the input is not modified.
    Zero rows are dropped from the result.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        if lead != 1:
            m[r] = [q(Fraction(v) / lead) if v else 0 for v in m[r]]
        prow = m[r]
        nz = [j for j in range(c, ncols) if prow[j] != 0]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                row = m[i]
                for j in nz:
                    row[j] = q(row[j] - factor * prow[j])
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[Number]]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence[Number]], ncols: int) -> list[list[Number]]:
    """Basis of ``{v : rows @ v = 0}``."""
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(red, pivots):
            v[pc] = q(-row[fc])
        basis.append(v)
    return basis


def solve(matrix: Sequence[Sequence[Number]], rhs: Sequence[Number]):
    """One exact solution of ``matrix @ x = rhs`` or ``None``."""
    ncols = len(matrix[0]) if matrix else 0
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    return x


def inverse(matrix: Sequence[Sequence[Number]]) -> list[list[Number]]:
    n = len(matrix)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)]
           for i, row in enumerate(matrix)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b)) if b else []
    out = []
    for row in a:
        nz = [(k, v) for k, v in enumerate(row) if v != 0]
        out.append([q(sum((v * col[k] for k, v in nz), 0)) for col in bt])
    return out


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    nz = [(k, x) for k, x in enumerate(v) if x != 0]
    return [q(sum((row[k] * x for k, x in nz), 0)) for row in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def independent_rows(rows: Iterable[Sequence[Number]], limit: int | None = None):
    """Indices of a greedy maximal independent subset of ``rows`` (in order)."""
    basis: list[tuple[int, list]] = []  # (pivot column, normalised row)
    chosen = []
    for idx, row in enumerate(rows):
        v = list(row)
        for pc, b in basis:
            if v[pc] != 0:
                f = v[pc]
                v = [q(x - f * y) if y else x for x, y in zip(v, b)]
        pc = next((j for j, x in enumerate(v) if x != 0), None)
        if pc is None:
            continue
        lead = v[pc]
        v = [q(Fraction(x) / lead) if x else 0 for x in v]
        basis.append((pc, v))
        chosen.append(idx)
        if limit is not None and len(chosen) == limit:
            break
    return chosen
