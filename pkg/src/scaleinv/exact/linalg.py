"""Exact rational matrices.

Entries are :class:`fractions.Fraction`; vectors are plain tuples of
Fractions and act as column vectors (``m @ v``).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]


class DimensionError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


def vec(values: Iterable) -> Vector:
    return tuple(as_fraction(v) for v in values)


def zero_vec(n: int) -> Vector:
    return (Fraction(0),) * n


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def is_zero_vec(v: Vector) -> bool:
    return not any(v)


def is_integral_vec(v: Vector) -> bool:
    return all(a.denominator == 1 for a in v)


class Matrix:
    """Immutable dense matrix over Q."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        data = tuple(tuple(as_fraction(x) for x in row) for row in entries)
        if cols is None:
            cols = len(data[0]) if data else 0
        for row in data:
            if len(row) != cols:
                raise DimensionError("ragged matrix rows")
        self.rows = len(data)
        self.cols = cols
        self._e = data

    # construction -------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def diag(cls, values: Sequence) -> Matrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> Matrix:
        if not columns:
            return cls.zeros(rows or 0, 0)
        return cls(list(zip(*columns)), len(columns))

    # access -------------------------------------------------------------
    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return self._e[i][j]
        return self._e[idx]

    def row(self, i: int) -> Vector:
        return self._e[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self._e)

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.cols)]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._e]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __iter__(self):
        return iter(self._e)

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.cols == other.cols and self._e == other._e

    def __hash__(self) -> int:
        return hash((self.cols, self._e))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self._e)
        return f"Matrix([{body}])"

    # arithmetic ---------------------------------------------------------
    def _check_same(self, other: Matrix) -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: Matrix) -> Matrix:
        self._check_same(other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)], self.cols)

    def __sub__(self, other: Matrix) -> Matrix:
        self._check_same(other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)], self.cols)

    def __neg__(self) -> Matrix:
        return Matrix([[-a for a in r] for r in self._e], self.cols)

    def scale(self, c) -> Matrix:
        c = as_fraction(c)
        return Matrix([[c * a for a in r] for r in self._e], self.cols)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            ocols = other.columns()
            return Matrix(
                [[sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in ocols] for r in self._e],
                other.cols,
            )
        v = tuple(other)
        if len(v) != self.cols:
            raise DimensionError(f"cannot apply {self.shape} matrix to length-{len(v)} vector")
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self._e)

    def __pow__(self, n: int) -> Matrix:
        if not self.is_square:
            raise DimensionError("power of a non-square matrix")
        if n < 0:
            return self.inverse() ** (-n)
        result = Matrix.identity(self.rows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            n >>= 1
            if n:
                base = base @ base
        return result

    @property
    def T(self) -> Matrix:
        return Matrix(list(zip(*self._e)) if self.rows else [], self.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix([[self._e[i][j] for j in cols] for i in rows], len(cols))

    def block(self, r0: int, r1: int, c0: int, c1: int) -> Matrix:
        return self.submatrix(range(r0, r1), range(c0, c1))

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self._e for a in r)

    def is_identity(self) -> bool:
        return self.is_square and self == Matrix.identity(self.rows)

    def trace(self) -> Fraction:
        if not self.is_square:
            raise DimensionError("trace of a non-square matrix")
        return sum((self._e[i][i] for i in range(self.rows)), Fraction(0))

    # elimination --------------------------------------------------------
    def rref(self) -> tuple[Matrix, tuple[int, ...]]:
        """Reduced row echelon form and pivot columns."""
        m = [list(r) for r in self._e]
        pivots = []
        r = 0
        for c in range(self.cols):
            if r == self.rows:
                break
            p = next((i for i in range(r, self.rows) if m[i][c]), None)
            if p is None:
                continue
            m[r], m[p] = m[p], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return Matrix(m, self.cols), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[Vector]:
        """Basis of {v : self @ v = 0}, one vector per free column."""
        R, pivots = self.rref()
        free = [j for j in range(self.cols) if j not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for i, p in enumerate(pivots):
                v[p] = -R[i, f]
            basis.append(tuple(v))
        return basis

    def det(self) -> Fraction:
        if not self.is_square:
            raise DimensionError("determinant of a non-square matrix")
        m = [list(r) for r in self._e]
        n = self.rows
        d = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if m[i][c]), None)
            if p is None:
                return Fraction(0)
            if p != c:
                m[c], m[p] = m[p], m[c]
                d = -d
            d *= m[c][c]
            inv = 1 / m[c][c]
            for i in range(c + 1, n):
                if m[i][c]:
                    f = m[i][c] * inv
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return d

    def inverse(self) -> Matrix:
        if not self.is_square:
            raise DimensionError("inverse of a non-square matrix")
        n = self.rows
        aug = Matrix([list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self._e)], 2 * n)
        R, pivots = aug.rref()
        if pivots[:n] != tuple(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return R.block(0, n, n, 2 * n)

    def solve(self, b: Sequence) -> Vector | None:
        """One solution of self @ x = b, or None if inconsistent."""
        b = vec(b)
        aug = Matrix([list(r) + [bi] for r, bi in zip(self._e, b)], self.cols + 1)
        R, pivots = aug.rref()
        if pivots and pivots[-1] == self.cols:
            return None
        x = [Fraction(0)] * self.cols
        for i, p in enumerate(pivots):
            x[p] = R[i, self.cols]
        return tuple(x)

    def charpoly(self):
        from .poly import charpoly

        return charpoly(self)


def row_space(vectors: Iterable[Sequence], n: int) -> Matrix:
    """Canonical basis (nonzero rows of the RREF) of the span of ``vectors``."""
    rows = [vec(v) for v in vectors]
    if not rows:
        return Matrix.zeros(0, n)
    R, pivots = Matrix(rows, n).rref()
    return R.block(0, len(pivots), 0, n)


def in_span(basis: Matrix, v: Sequence) -> bool:
    if basis.rows == 0:
        return is_zero_vec(vec(v))
    return basis.T.solve(v) is not None


def coords_in(basis: Matrix, v: Sequence) -> Vector:
    """Coordinates of v w.r.t. the rows of ``basis`` (must lie in the span)."""
    sol = basis.T.solve(v)
    if sol is None:
        raise ValueError("vector not in span")
    return sol


def extend_basis(sub: Matrix, ambient: Matrix) -> list[Vector]:
    """Rows of ``ambient`` (in order) completing ``sub`` to a basis of span(ambient)."""
    current = [sub.row(i) for i in range(sub.rows)]
    added = []
    n = ambient.cols
    rank = len(current) and row_space(current, n).rows
    for i in range(ambient.rows):
        candidate = current + [ambient.row(i)]
        r = row_space(candidate, n).rows
        if r > rank:
            current = candidate
            added.append(ambient.row(i))
            rank = r
    return added


def lcm_denominator(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = out * v.denominator // gcd(out, v.denominator)
    return out


def primitive_integer_vector(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (sign kept)."""
    L = lcm_denominator(v)
    ints = [int(x * L) for x in v]
    g = 0
    for a in ints:
        g = gcd(g, a)
    return tuple(a // g for a in ints) if g else tuple(ints)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def smith_form(m: Matrix) -> tuple[tuple[int, ...], Matrix, Matrix]:
    """Smith normal form of an integer matrix.

    Returns ``(factors, U, V)`` with ``U @ m @ V`` diagonal, diagonal entries
    ``factors`` (length ``min(rows, cols)``, nonnegative, each dividing the
    next) and ``U``, ``V`` unimodular.
    """
    if not m.is_integral():
        raise ValueError("smith_form needs an integer matrix")
    rows, cols = m.rows, m.cols
    A = [[int(x) for x in r] for r in m]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for r in A:
            r[dst] += f * r[src]
        for r in V:
            r[dst] += f * r[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        done = False
        while not done:
            done = True
            for i in range(t + 1, rows):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, cols):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                # divisibility: pivot must divide the rest of the block
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if A[i][j] % A[t][t]),
                    None,
                )
                if bad is not None:
                    add_row(t, bad[0], 1)
                    done = False
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    factors = tuple(A[i][i] for i in range(min(rows, cols)))
    return factors, Matrix(U, rows), Matrix(V, cols)
