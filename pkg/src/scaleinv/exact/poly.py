"""Univariate polynomials over Q and exact root location.

Coefficients are stored lowest degree first.  Root location relative to the
unit circle is exact: cyclotomic factors are split off by trial division,
the rest is made square-free, the part sharing roots with its reciprocal is
handled through the substitution x = t + 1/t and Sturm sequences, and what
remains goes through the Schur-Cohn Hermitian form, whose inertia is read
off by symmetric Gaussian elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .linalg import DimensionError, Matrix, as_fraction


class Polynomial:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [as_fraction(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> Polynomial:
        return cls([0] * degree + [coeff])

    @classmethod
    def from_roots(cls, roots: Iterable) -> Polynomial:
        p = cls([1])
        for r in roots:
            p = p * cls([-as_fraction(r), 1])
        return p

    # basic properties ----------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial([other])
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        return self.format("t")

    def format(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = var if k == 1 else f"{var}^{k}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> Polynomial:
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(-x for x in self.coeffs)

    def __sub__(self, other) -> Polynomial:
        return self + (-_lift(other))

    def __rsub__(self, other) -> Polynomial:
        return _lift(other) - self

    def __mul__(self, other) -> Polynomial:
        other = _lift(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Polynomial:
        out = Polynomial([1])
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other) -> tuple[Polynomial, Polynomial]:
        other = _lift(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(r) - other.degree)
        inv = 1 / other.lc
        d = other.degree
        for k in range(len(r) - 1, d - 1, -1):
            c = r[k] * inv
            if c:
                q[k - d] = c
                for j, b in enumerate(other.coeffs):
                    r[k - d + j] -= c * b
        return Polynomial(q), Polynomial(r[:d] if d > 0 else [])

    def __floordiv__(self, other) -> Polynomial:
        return divmod(self, other)[0]

    def __mod__(self, other) -> Polynomial:
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> Polynomial:
        return Polynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def monic(self) -> Polynomial:
        if self.is_zero():
            return self
        inv = 1 / self.lc
        return Polynomial(c * inv for c in self.coeffs)

    def reverse(self) -> Polynomial:
        """t^deg * p(1/t)."""
        return Polynomial(reversed(self.coeffs))

    def substitute_scale(self, s) -> Polynomial:
        """p(s * t)."""
        s = as_fraction(s)
        return Polynomial(c * s**k for k, c in enumerate(self.coeffs))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def divides(self, other: Polynomial) -> bool:
        return (other % self).is_zero()


def _lift(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    return Polynomial([x])


T = Polynomial([0, 1])


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def square_free_decomposition(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: p = lc * prod f_i^i with f_i monic, square-free, coprime."""
    if p.degree < 1:
        return []
    out = []
    a = p.monic()
    b = a.derivative()
    c = poly_gcd(a, b)
    w = a // c
    y = b // c
    i = 1
    while w.degree > 0:
        z = y - w.derivative()
        g = poly_gcd(w, z)
        if g.degree > 0:
            out.append((g, i))
        w = w // g
        y = z // g
        i += 1
    return out


# ---------------------------------------------------------------------------
# characteristic polynomial
# ---------------------------------------------------------------------------

def charpoly(m: Matrix) -> Polynomial:
    """det(tI - m) by the Faddeev-LeVerrier recurrence (exact over Q)."""
    if not m.is_square:
        raise DimensionError("charpoly of a non-square matrix")
    n = m.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = Matrix.zeros(n, n)
    ident = Matrix.identity(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        M = m @ M + ident.scale(c)
        c = -(m @ M).trace() / k
        coeffs[n - k] = c
    return Polynomial(coeffs)


# ---------------------------------------------------------------------------
# cyclotomic polynomials
# ---------------------------------------------------------------------------

def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> Polynomial:
    p = Polynomial.monomial(n) - 1
    for d in range(1, n):
        if n % d == 0:
            p = p // cyclotomic(d)
    return p


def cyclotomic_orders_up_to(degree: int) -> list[int]:
    """All n with phi(n) <= degree (phi(n) >= sqrt(n/2) bounds the search)."""
    bound = max(2, 2 * degree * degree + 2)
    return [n for n in range(1, bound + 1) if euler_phi(n) <= degree]


# ---------------------------------------------------------------------------
# Sturm sequences
# ---------------------------------------------------------------------------

def sturm_sequence(p: Polynomial) -> list[Polynomial]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = -(seq[-2] % seq[-1])
        seq.append(r)
    return seq[:-1]


def _sign_changes(values: Sequence) -> int:
    signs = [v > 0 for v in values if v]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _values_at(seq: list[Polynomial], x) -> list:
    if x == "inf":
        return [q.lc for q in seq]
    if x == "-inf":
        return [q.lc * (-1) ** q.degree for q in seq]
    return [q(x) for q in seq]


def count_distinct_real_roots(p: Polynomial, lo, hi) -> int:
    """Distinct real roots in the half-open interval (lo, hi].

    ``lo``/``hi`` may be rationals or the strings "-inf"/"inf".
    """
    if p.degree < 1:
        return 0
    seq = sturm_sequence(p)
    return _sign_changes(_values_at(seq, lo)) - _sign_changes(_values_at(seq, hi))


def count_real_roots(p: Polynomial, lo, hi, *, open_hi: bool = True) -> int:
    """Real roots with multiplicity in (lo, hi) (or (lo, hi] if not open_hi)."""
    total = 0
    for f, mult in square_free_decomposition(p):
        n = count_distinct_real_roots(f, lo, hi)
        if open_hi and hi not in ("inf", "-inf") and f(as_fraction(hi)) == 0:
            n -= 1
        total += n * mult
    return total


# ---------------------------------------------------------------------------
# unit disk root location
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootLocation:
    inside: int
    on_circle: int
    outside: int
    cyclotomic_factors: tuple[tuple[int, int], ...]  # (order n, multiplicity)

    def cyclotomic_polynomials(self) -> list[Polynomial]:
        return [cyclotomic(n) for n, _ in self.cyclotomic_factors]


def _inertia(m: Matrix) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix."""
    a = [list(r) for r in m]
    n = m.rows
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # congruence: row/col i += row/col j makes a[i][i] = 2 a[i][j] + a[j][j] != 0
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            if a[i][piv]:
                f = a[i][piv] / d
                for k in active:
                    a[i][k] -= f * a[piv][k]
        for i in active:
            a[i][piv] = a[piv][i] = Fraction(0)
    return pos, neg, n - pos - neg


def schur_cohn_matrix(p: Polynomial) -> Matrix:
    """Hermitian (here real symmetric) Schur-Cohn form of p.

    Its coefficients are those of (p*(z)p*(w) - p(z)p(w)) / (1 - zw) with
    p*(z) = z^n p(1/z).  When p and p* are coprime the form is nonsingular
    and has one positive direction per root inside the unit disk.
    """
    n = p.degree
    a = list(p.coeffs)
    N = [[a[n - j] * a[n - k] - a[j] * a[k] for k in range(n + 1)] for j in range(n + 1)]
    C = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        for k in range(n):
            C[j][k] = N[j][k] + (C[j - 1][k - 1] if j and k else 0)
    return Matrix(C, n)


def _palindromic_to_trace_poly(h: Polynomial) -> Polynomial:
    """For palindromic h of degree 2k, the H with h(t) = t^k H(t + 1/t)."""
    k = h.degree // 2
    c = h.coeffs
    x = Polynomial([0, 1])
    dickson = [Polynomial([2]), x]
    for _ in range(2, k + 1):
        dickson.append(x * dickson[-1] - dickson[-2])
    H = Polynomial([c[k]])
    for j in range(1, k + 1):
        H = H + dickson[j] * c[k + j]
    return H


def _split_cyclotomic(p: Polynomial) -> tuple[Polynomial, list[tuple[int, int]]]:
    found = []
    for n in cyclotomic_orders_up_to(p.degree):
        phi = cyclotomic(n)
        if phi.degree > p.degree:
            continue
        mult = 0
        while p.degree >= phi.degree:
            q, r = divmod(p, phi)
            if not r.is_zero():
                break
            p = q
            mult += 1
        if mult:
            found.append((n, mult))
    return p, found


def _locate_square_free(g: Polynomial) -> tuple[int, int]:
    """(inside, on_circle) for square-free g with g(0) != 0 and g(+-1) != 0."""
    if g.degree < 1:
        return 0, 0
    h = poly_gcd(g, g.reverse())
    inside = on = 0
    if h.degree > 0:
        H = _palindromic_to_trace_poly(h)
        on = 2 * count_distinct_real_roots(H, Fraction(-2), Fraction(2))
        inside += (h.degree - on) // 2
    r = g // h if h.degree > 0 else g
    if r.degree > 0:
        pos, neg, zero = _inertia(schur_cohn_matrix(r))
        if zero:
            raise ArithmeticError("singular Schur-Cohn form after reciprocal splitting")
        inside += pos
    return inside, on


def unit_disk_root_analysis(p: Polynomial) -> RootLocation:
    """Exact counts of roots of p inside / on / outside the unit circle."""
    if p.is_zero():
        raise ValueError("unit_disk_root_analysis of the zero polynomial")
    deg = p.degree
    zeros = 0
    while zeros < len(p.coeffs) and not p.coeffs[zeros]:
        zeros += 1
    q = Polynomial(p.coeffs[zeros:])
    q, cyc = _split_cyclotomic(q)
    inside = zeros
    on = sum(cyclotomic(n).degree * m for n, m in cyc)
    for f, mult in square_free_decomposition(q):
        i, o = _locate_square_free(f)
        inside += i * mult
        on += o * mult
    return RootLocation(inside, on, deg - inside - on, tuple(cyc))


# ---------------------------------------------------------------------------
# power series helpers (truncated, exact)
# ---------------------------------------------------------------------------

def series_mul(a: Sequence[Fraction], b: Sequence[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x:
            for j, y in enumerate(b[: order + 1 - i]):
                if y:
                    out[i + j] += x * y
    return out


def series_inverse(a: Sequence[Fraction], order: int) -> list[Fraction]:
    if not a or not a[0]:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    a = list(a) + [Fraction(0)] * (order + 1 - len(a))
    inv = [Fraction(0)] * (order + 1)
    inv[0] = 1 / a[0]
    for n in range(1, order + 1):
        s = sum((a[k] * inv[n - k] for k in range(1, n + 1) if a[k]), Fraction(0))
        inv[n] = -s * inv[0]
    return inv


def log_series(p: Polynomial, order: int) -> list[Fraction]:
    """Coefficients of log(p(z)) up to z^order; requires p(0) = 1."""
    c = list(p.coeffs) or [Fraction(0)]
    if c[0] != 1:
        raise ValueError("log_series needs constant term 1")
    dp = list(p.derivative().coeffs)
    quot = series_mul(dp, series_inverse(c, order), order)
    out = [Fraction(0)] * (order + 1)
    for n in range(1, order + 1):
        out[n] = quot[n - 1] / n
    return out


def exp_series(a: Sequence[Fraction], order: int) -> list[Fraction]:
    """exp of a series with zero constant term, up to z^order."""
    a = list(a) + [Fraction(0)] * (order + 1 - len(a))
    if a[0]:
        raise ValueError("exp_series needs zero constant term")
    out = [Fraction(0)] * (order + 1)
    out[0] = Fraction(1)
    # f' = a' f
    for n in range(1, order + 1):
        s = sum((k * a[k] * out[n - k] for k in range(1, n + 1) if a[k]), Fraction(0))
        out[n] = s / n
    return out


def integer_content(p: Polynomial) -> int:
    g = 0
    for c in p.coeffs:
        g = gcd(g, c.numerator)
    return g
