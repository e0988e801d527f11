"""Reidemeister numbers of lattice endomorphisms and their zeta functions.

For a torsion-free nilpotent group the twisted conjugacy classes split over
the layers of the lower central series, so R(phi) is the product of the
abelian numbers |det(I - phi_i)|, with any zero factor meaning infinitely
many classes.

The zeta function exp(sum R(phi^n) z^n / n) is rational.  Writing
a_n = det(I - Phi^n) = sum_k (-1)^k tr(Lambda^k Phi^n), the sign of a_n is
sigma * tau^n where sigma, tau only depend on how many real eigenvalues lie
beyond +1 and beyond -1.  That gives the closed form

    R_phi(z) = ( prod_{k odd} det(I - tau z Lambda^k Phi)
               / prod_{k even} det(I - tau z Lambda^k Phi) ) ** sigma

which is then checked coefficient by coefficient against the definition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import Matrix, Polynomial, charpoly, count_real_roots, smith_form
from .exact.poly import log_series, poly_gcd
from .malcev import INFINITE, Lattice
from .morphisms import LieMorphism, layer_maps


class FinitenessFails(ValueError):
    def __init__(self, n: int):
        super().__init__(f"R(phi^{n}) is infinite")
        self.n = n


class NotRationalAtOrder(ValueError):
    def __init__(self, n: int, expected, got):
        super().__init__(f"series coefficient {n} mismatch: R(phi^{n}) = {expected}, candidate gives {got}")
        self.n = n
        self.expected = expected
        self.got = got


# ---------------------------------------------------------------------------
# Reidemeister numbers
# ---------------------------------------------------------------------------

def reidemeister_abelian(M: Matrix):
    """Number of phi-twisted classes of Z^m, i.e. |Z^m / (I - M) Z^m|."""
    d = Matrix.identity(M.rows) - M
    det = d.det()
    return INFINITE if det == 0 else int(abs(det))


def smith_coset_count(M: Matrix):
    """Same count via the Smith form of I - M (an independent route)."""
    factors, _, _ = smith_form(Matrix.identity(M.rows) - M)
    if len(factors) < M.rows or any(f == 0 for f in factors):
        return INFINITE
    return math.prod(abs(int(f)) for f in factors)


def _product(values):
    out = 1
    for v in values:
        if v == INFINITE:
            return INFINITE
        out *= v
    return out


def reidemeister_nilpotent(lattice: Lattice, phi: LieMorphism):
    return _product(reidemeister_abelian(b) for b in layer_maps(lattice, phi).blocks)


def reidemeister_sequence(lattice: Lattice, phi: LieMorphism, N: int) -> list:
    blocks = layer_maps(lattice, phi).blocks
    out = []
    powers = [Matrix.identity(b.rows) for b in blocks]
    for _ in range(N):
        powers = [p @ b for p, b in zip(powers, blocks)]
        out.append(_product(reidemeister_abelian(p) for p in powers))
    return out


# ---------------------------------------------------------------------------
# exterior powers
# ---------------------------------------------------------------------------

def compound_matrix(M: Matrix, k: int) -> Matrix:
    """Lambda^k M: the matrix of k x k minors, subsets in lexicographic order."""
    n = M.rows
    if k == 0:
        return Matrix.identity(1)
    subsets = list(itertools.combinations(range(n), k))
    return Matrix([[M.submatrix(r, c).det() for c in subsets] for r in subsets], len(subsets))


def exterior_traces(M: Matrix, n: int = 1) -> list[Fraction]:
    """tr(Lambda^k M^n) for k = 0..dim, via Newton's identities.

    tr(Lambda^k M^n) is the k-th elementary symmetric function of the n-th
    powers of the eigenvalues; power sums are traces of powers of M^n.
    """
    d = M.rows
    Mn = M**n
    p = [Fraction(d)]
    P = Matrix.identity(d)
    for _ in range(d):
        P = P @ Mn
        p.append(P.trace())
    e = [Fraction(1)]
    for k in range(1, d + 1):
        s = sum(((-1) ** (i - 1) * e[k - i] * p[i] for i in range(1, k + 1)), Fraction(0))
        e.append(s / k)
    return e


def signed_term(M: Matrix, n: int) -> Fraction:
    """a_n = det(I - M^n) = sum_k (-1)^k tr(Lambda^k M^n)."""
    return sum(((-1) ** k * t for k, t in enumerate(exterior_traces(M, n))), Fraction(0))


def _det_one_minus(N: Matrix, scale: int) -> Polynomial:
    """det(I - scale * z * N) as a polynomial in z."""
    # det(I - s z N) = z^m chi_N(1 / (s z)) up to the s^m factor, i.e. the reversed charpoly
    return charpoly(N).reverse().substitute_scale(scale)


# ---------------------------------------------------------------------------
# zeta function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaCertificate:
    numerator: Polynomial
    denominator: Polynomial
    sign_period: int
    verified_order: int
    sigma: int = 1
    tau: int = 1

    def series(self, order: int | None = None) -> list[Fraction]:
        """Coefficients of log R_phi(z), index n holds R(phi^n)/n."""
        order = self.verified_order if order is None else order
        a = log_series(self.numerator, order)
        b = log_series(self.denominator, order)
        return [x - y for x, y in zip(a, b)]

    def format(self, var: str = "z") -> str:
        return f"({self.numerator.format(var)}) / ({self.denominator.format(var)})"

    def to_dict(self) -> dict:
        return {
            "numerator": [str(c) for c in self.numerator.coeffs],
            "denominator": [str(c) for c in self.denominator.coeffs],
            "rational_function": self.format(),
            "sign_period": self.sign_period,
            "verified_order": self.verified_order,
            "sigma": self.sigma,
            "tau": self.tau,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ZetaCertificate:
        return cls(
            Polynomial([Fraction(c) for c in d["numerator"]]),
            Polynomial([Fraction(c) for c in d["denominator"]]),
            d["sign_period"],
            d["verified_order"],
            d.get("sigma", 1),
            d.get("tau", 1),
        )


def sign_rule(M: Matrix) -> tuple[int, int]:
    """(sigma, tau) with sign(det(I - M^n)) = sigma * tau^n when nonzero."""
    chi = charpoly(M)
    p = count_real_roots(chi, 1, "inf")
    q = count_real_roots(chi, "-inf", -1)
    return (-1) ** (p + q), (-1) ** q


def zeta_certificate(lattice: Lattice, phi: LieMorphism, order: int = 20) -> ZetaCertificate:
    if order < 1:
        raise ValueError("order must be positive")
    maps = layer_maps(lattice, phi)
    M = maps.adapted
    R = reidemeister_sequence(lattice, phi, order)
    for n, r in enumerate(R, 1):
        if r == INFINITE:
            raise FinitenessFails(n)
    sigma, tau = sign_rule(M)
    # the sign rule has to agree with the exact signs of a_n
    for n in range(1, order + 1):
        a = signed_term(M, n)
        if abs(a) != R[n - 1] or (1 if a > 0 else -1) != sigma * tau**n:
            raise NotRationalAtOrder(n, R[n - 1], a)
    odd, even = Polynomial([1]), Polynomial([1])
    for k in range(M.rows + 1):
        f = _det_one_minus(compound_matrix(M, k), tau)
        if k % 2:
            odd = odd * f
        else:
            even = even * f
    num, den = (odd, even) if sigma == 1 else (even, odd)
    g = poly_gcd(num, den)
    num, den = num // g, den // g
    # normalise constant terms to 1 (both are +-1 multiples already)
    num, den = num * (1 / num.coeffs[0]), den * (1 / den.coeffs[0])
    cert = ZetaCertificate(num, den, 1 if tau == 1 else 2, order, sigma, tau)
    got = cert.series(order)
    for n in range(1, order + 1):
        if got[n] * n != R[n - 1]:
            raise NotRationalAtOrder(n, R[n - 1], got[n] * n)
    return cert
