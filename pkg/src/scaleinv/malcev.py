"""The radicable group N^Q as exp of a nilpotent Lie algebra.

Group elements are tuples of Fractions holding first-kind coordinates (the
logarithm in the standard basis).  Multiplication is the Baker-Campbell-
Hausdorff series in Dynkin's form, truncated at the nilpotency class, so it
is finite and exact.

A :class:`Lattice` is a full subgroup described by a basis ``b_1..b_d``
adapted to the lower central series: it is the set of products
``exp(v_1 b_1) ... exp(v_d b_d)`` with integer ``v`` (second-kind
coordinates).  First-kind integer points are not a subgroup in general,
which is why the two coordinate systems are kept apart.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .exact import Matrix, as_fraction, row_space
from .exact.linalg import Vector, is_integral_vec, vadd, vscale, zero_vec
from .liealg import NilpotentLieAlgebra, lower_central_series

GroupElement = tuple  # tuple[Fraction, ...] of first-kind coordinates
INFINITE = math.inf


class LatticeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# BCH
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def dynkin_terms(max_len: int) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    """Words over {0: X, 1: Y} of length <= max_len with Dynkin coefficients.

    log(e^X e^Y) = sum coef * [w_1, [w_2, ... [w_{m-1}, w_m]]].
    The cache makes the table a one-time computation per length; lru_cache
    is safe for concurrent readers.
    """
    acc: dict[tuple[int, ...], Fraction] = {}

    def pairs(remaining: int):
        # sequences of (r_i, s_i) with r_i + s_i >= 1 and total length <= remaining
        if remaining == 0:
            yield ()
            return
        yield ()
        for r in range(remaining + 1):
            for s in range(remaining + 1 - r):
                if r + s == 0:
                    continue
                for rest in pairs(remaining - r - s):
                    yield ((r, s),) + rest

    for seq in pairs(max_len):
        n = len(seq)
        if n == 0:
            continue
        m = sum(r + s for r, s in seq)
        denom = m
        word: list[int] = []
        for r, s in seq:
            denom *= math.factorial(r) * math.factorial(s)
            word.extend([0] * r + [1] * s)
        coef = Fraction((-1) ** (n - 1), n * denom)
        w = tuple(word)
        if len(w) >= 2 and w[-1] == w[-2]:
            continue  # innermost bracket [X, X] or [Y, Y] vanishes
        acc[w] = acc.get(w, Fraction(0)) + coef
    return tuple(sorted((w, c) for w, c in acc.items() if c))


def bch(algebra: NilpotentLieAlgebra, x: Sequence[Fraction], y: Sequence[Fraction]) -> GroupElement:
    """log(exp x * exp y)."""
    if not any(x):
        return tuple(y)
    if not any(y):
        return tuple(x)
    if algebra.is_abelian():
        return vadd(x, y)
    c = lower_central_series(algebra).nilpotency_class
    letters = (tuple(x), tuple(y))
    memo: dict[tuple[int, ...], Vector] = {}

    def value(w):
        if len(w) == 1:
            return letters[w[0]]
        v = memo.get(w)
        if v is None:
            inner = value(w[1:])
            v = algebra.bracket(letters[w[0]], inner) if any(inner) else inner
            memo[w] = v
        return v

    out = [Fraction(0)] * algebra.dim
    for w, coef in dynkin_terms(c):
        v = value(w)
        if any(v):
            for k, a in enumerate(v):
                if a:
                    out[k] += coef * a
    return tuple(out)


def inverse(x: Sequence[Fraction]) -> GroupElement:
    return tuple(-a for a in x)


def power(algebra: NilpotentLieAlgebra | None, x: Sequence[Fraction], q) -> GroupElement:
    """x^q = exp(q log x) for rational q.  The algebra is not needed."""
    q = as_fraction(q)
    return tuple(q * a for a in x)


def identity(dim: int) -> GroupElement:
    return zero_vec(dim)


def product(algebra: NilpotentLieAlgebra, elements: Iterable[Sequence[Fraction]]) -> GroupElement:
    out = identity(algebra.dim)
    for e in elements:
        out = bch(algebra, out, e)
    return out


def commutator(algebra: NilpotentLieAlgebra, x, y) -> GroupElement:
    """x y x^-1 y^-1."""
    return product(algebra, (x, y, inverse(x), inverse(y)))


def conjugate(algebra: NilpotentLieAlgebra, x, y) -> GroupElement:
    """x y x^-1."""
    return product(algebra, (x, y, inverse(x)))


def adjoint_exp(algebra: NilpotentLieAlgebra, x: Sequence[Fraction]) -> Matrix:
    """Ad(exp x) = exp(ad x), a unipotent matrix (finite series)."""
    d = algebra.dim
    A = algebra.ad(x)
    out = Matrix.identity(d)
    term = Matrix.identity(d)
    for k in range(1, d + 1):
        term = (term @ A).scale(Fraction(1, k))
        if not any(any(r) for r in term):
            break
        out = out + term
    return out


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

class Lattice:
    """Full subgroup {exp(v_1 b_1) ... exp(v_d b_d) : v integer}."""

    def __init__(self, algebra: NilpotentLieAlgebra, basis: Matrix, *, check: bool = True):
        self.algebra = algebra
        self.basis = basis
        d = algebra.dim
        if basis.rows != d or basis.cols != d:
            raise LatticeError(f"adapted basis must be {d}x{d}")
        if basis.det() == 0:
            raise LatticeError("adapted basis is singular")
        self._basis_T_inv = basis.T.inverse()  # first-kind coords -> basis coords
        self.flag = lower_central_series(algebra)
        self.layer_dims = self.flag.layer_dims
        if check:
            self._check_adapted()
            bad = self.closure_defect()
            if bad is not None:
                raise LatticeError(bad)

    @classmethod
    def standard(cls, algebra: NilpotentLieAlgebra) -> Lattice:
        return cls(algebra, Matrix.identity(algebra.dim))

    @classmethod
    def generated_by(cls, algebra: NilpotentLieAlgebra, elements: Sequence[Sequence[Fraction]]) -> Lattice:
        """The subgroup generated by ``elements``; it must be full."""
        ref = Lattice(algebra, lower_central_series(algebra).adapted_basis(), check=False)
        table = induced_sequence(ref, elements)
        if any(u is None for u in table):
            raise LatticeError("elements do not generate a full subgroup")
        return cls(algebra, Matrix([list(u) for u in table], algebra.dim))

    def __eq__(self, other) -> bool:
        return isinstance(other, Lattice) and self.algebra == other.algebra and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.algebra, self.basis))

    def __repr__(self) -> str:
        return f"Lattice({self.basis!r})"

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def _check_adapted(self) -> None:
        offsets = self.flag.layer_offsets()
        for layer, start in enumerate(offsets):
            tail = row_space((self.basis.row(r) for r in range(start, self.dim)), self.dim)
            if tail != self.flag.subspaces[layer]:
                raise LatticeError(
                    f"basis rows from {start + 1} on do not span gamma_{layer + 1} of the lower central series"
                )

    def generators(self) -> list[GroupElement]:
        return [self.basis.row(k) for k in range(self.dim)]

    def layer_slices(self) -> list[range]:
        out, acc = [], 0
        for m in self.layer_dims:
            out.append(range(acc, acc + m))
            acc += m
        return out

    # coordinates ----------------------------------------------------------
    def adapted_coords(self, x: Sequence[Fraction]) -> Vector:
        """First-kind coordinates of x w.r.t. the adapted basis."""
        return self._basis_T_inv @ x

    def adapted_matrix(self, m: Matrix) -> Matrix:
        """A linear map (standard basis, column convention) in the adapted basis."""
        return self._basis_T_inv @ m @ self.basis.T

    def to_second_kind(self, x: Sequence[Fraction]) -> Vector:
        alg = self.algebra
        d = self.dim
        v = []
        cur = tuple(x)
        for k in range(d):
            c = self.adapted_coords(cur)
            vk = c[k]
            v.append(vk)
            if vk:
                cur = bch(alg, vscale(-vk, self.basis.row(k)), cur)
        return tuple(v)

    def from_second_kind(self, v: Sequence) -> GroupElement:
        alg = self.algebra
        out = identity(self.dim)
        for k, a in enumerate(v):
            a = as_fraction(a)
            if a:
                out = bch(alg, out, vscale(a, self.basis.row(k)))
        return out

    def contains(self, x: Sequence[Fraction]) -> bool:
        return is_integral_vec(self.to_second_kind(x))

    def closure_defect(self) -> str | None:
        """None if the integer points form a group, else a description.

        Checks that g_i^{+-1} g_j g_i^{-+1} (i < j) has integral second-kind
        coordinates vanishing before position j, which is what lets every
        product of normal forms collect back into a normal form.
        """
        gens = self.generators()
        alg = self.algebra
        for i, j in itertools.combinations(range(self.dim), 2):
            for gi in (gens[i], inverse(gens[i])):
                c = self.to_second_kind(conjugate(alg, inverse(gi), gens[j]))
                if not is_integral_vec(c) or any(c[:j]):
                    return f"conjugate of generator {j + 1} by generator {i + 1} is not a lattice point: {_fmt(c)}"
        return None

    def conjugated(self, x: Sequence[Fraction]) -> Lattice:
        """x N x^-1."""
        A = adjoint_exp(self.algebra, x)
        rows = [A @ self.basis.row(k) for k in range(self.dim)]
        return Lattice(self.algebra, Matrix(rows, self.dim), check=False)


def lattice_membership(lattice: Lattice, x) -> bool:
    return lattice.contains(x)


def to_second_kind(lattice: Lattice, x) -> Vector:
    return lattice.to_second_kind(x)


def from_second_kind(lattice: Lattice, v) -> GroupElement:
    return lattice.from_second_kind(v)


def _fmt(v) -> str:
    return "(" + ", ".join(str(a) for a in v) + ")"


# ---------------------------------------------------------------------------
# subgroups: induced sequences
# ---------------------------------------------------------------------------

def _depth(v: Sequence[Fraction]) -> int | None:
    return next((k for k, a in enumerate(v) if a), None)


def _rational_xgcd(a: Fraction, b: Fraction) -> tuple[Fraction, int, int]:
    """(g, s, t) with s*a + t*b = g generating the subgroup <a, b> of Q, g > 0."""
    L = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    A, B = int(a * L), int(b * L)
    old_r, r = A, B
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return Fraction(old_r, L), old_s, old_t


def induced_sequence(lattice: Lattice, elements: Iterable[Sequence[Fraction]]) -> list[GroupElement | None]:
    """Echelon generating sequence of the subgroup generated by ``elements``.

    Slot k holds an element of depth k (first nonzero second-kind coordinate
    w.r.t. ``lattice``) with positive leading coordinate, or None.  The
    subgroup is exactly the set of products u_1^e_1 ... u_d^e_d, e integer.
    Sifting mirrors Hermite reduction, with commutators of table entries fed
    back in so that deeper layers are saturated.
    """
    alg = lattice.algebra
    d = lattice.dim
    table: list[GroupElement | None] = [None] * d
    lead: list[Fraction | None] = [None] * d
    queue = [tuple(e) for e in elements]

    def install(k, u, sk):
        if sk[k] < 0:
            u = inverse(u)
            sk = lattice.to_second_kind(u)
        table[k] = u
        lead[k] = sk[k]
        for j in range(d):
            if j != k and table[j] is not None:
                queue.append(commutator(alg, u, table[j]))
                queue.append(commutator(alg, inverse(u), table[j]))

    while queue:
        g = queue.pop()
        while any(g):
            s = lattice.to_second_kind(g)
            k = _depth(s)
            if table[k] is None:
                install(k, g, s)
                break
            a, b = lead[k], s[k]
            q = b / a
            if q.denominator == 1:
                g = bch(alg, power(None, table[k], -q), g)
                continue
            gcd_val, sa, sb = _rational_xgcd(a, b)
            old = table[k]
            new = bch(alg, power(None, old, sa), power(None, g, sb))
            install(k, new, lattice.to_second_kind(new))
            queue.append(bch(alg, power(None, new, -(a / gcd_val)), old))
            queue.append(bch(alg, power(None, new, -(b / gcd_val)), g))
            break
    return table


def sublattice_index(lattice: Lattice, generators: Sequence[Sequence[Fraction]]):
    """[N : <generators>] as an int, or INFINITE."""
    for g in generators:
        if not lattice.contains(g):
            raise LatticeError(f"generator {_fmt(g)} is not in the lattice")
    table = induced_sequence(lattice, generators)
    index = 1
    for k, u in enumerate(table):
        if u is None:
            return INFINITE
        lead = lattice.to_second_kind(u)[k]
        index *= int(lead)
    return index


def coset_ball_points(
    lattice: Lattice,
    table: Sequence[GroupElement | None],
    bound: int,
    prefix: Sequence[Fraction] | None = None,
) -> Iterator[GroupElement]:
    """Elements prefix * h, h in the subgroup of ``table``, with |second-kind| <= bound.

    The subgroup is given by an induced sequence w.r.t. ``lattice``.  Because
    the basis refines a central series, coordinate k of prefix*u_1^e_1...u_k^e_k
    is coordinate k of the shorter product plus e_k times the leading
    coefficient of u_k, so each exponent ranges over an explicit interval.
    """
    alg = lattice.algebra
    d = lattice.dim
    leads = [lattice.to_second_kind(u)[k] if u is not None else None for k, u in enumerate(table)]
    start = tuple(prefix) if prefix is not None else identity(d)

    def rec(k, elem):
        if k == d:
            yield elem
            return
        s = lattice.to_second_kind(elem)
        u, a = table[k], leads[k]
        if u is None:
            if abs(s[k]) <= bound:
                yield from rec(k + 1, elem)
            return
        lo = math.ceil((-bound - s[k]) / a)
        hi = math.floor((bound - s[k]) / a)
        for e in range(lo, hi + 1):
            yield from rec(k + 1, bch(alg, elem, power(None, u, e)) if e else elem)

    yield from rec(0, start)
