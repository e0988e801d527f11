"""Endomorphisms of a lattice and their rational extensions.

A morphism is stored as a matrix acting on first-kind coordinates, so
``phi(exp x) = exp(M x)``.  Everything about eigenvalues is read off the
layer maps: the diagonal blocks of ``M`` written in an adapted basis, which
is block lower triangular because ``M`` preserves the lower central series.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import Matrix, Polynomial, as_fraction, charpoly, unit_disk_root_analysis
from .liealg import NilpotentLieAlgebra, lower_central_series
from .malcev import (
    GroupElement,
    Lattice,
    bch,
    coset_ball_points,
    induced_sequence,
    inverse,
    sublattice_index,
)


class MorphismError(ValueError):
    """Matrix is not an automorphism of the rational Lie algebra."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair  # 1-based offending basis pair, if any


class NotInvariant(ValueError):
    def __init__(self, message: str, generator: int):
        super().__init__(message)
        self.generator = generator  # 1-based index into the adapted basis


class NoUniqueSolution(ValueError):
    """phi has eigenvalue 1; ``witness`` is a nonzero fixed element."""

    def __init__(self, message: str, witness: GroupElement):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class LieMorphism:
    matrix: Matrix

    @property
    def dim(self) -> int:
        return self.matrix.rows

    def __call__(self, x: Sequence[Fraction]) -> GroupElement:
        return self.matrix @ x

    def __pow__(self, k: int) -> LieMorphism:
        return LieMorphism(self.matrix**k)

    def compose(self, other: LieMorphism) -> LieMorphism:
        """self after other."""
        return LieMorphism(self.matrix @ other.matrix)


def validate_morphism(algebra: NilpotentLieAlgebra, m: Matrix) -> LieMorphism:
    d = algebra.dim
    if m.shape != (d, d):
        raise MorphismError(f"matrix is {m.rows}x{m.cols}, algebra has dimension {d}")
    cols = m.columns()
    for i in range(d):
        for j in range(i + 1, d):
            lhs = m @ algebra.bracket(algebra.basis_vector(i), algebra.basis_vector(j))
            rhs = algebra.bracket(cols[i], cols[j])
            if lhs != rhs:
                raise MorphismError(
                    f"bracket not preserved on pair ({i + 1},{j + 1}): "
                    f"phi[e{i + 1},e{j + 1}] = {_fmt(lhs)} but [phi e{i + 1}, phi e{j + 1}] = {_fmt(rhs)}",
                    (i + 1, j + 1),
                )
    if m.det() == 0:
        raise MorphismError("matrix is singular, not an automorphism of the rational group")
    return LieMorphism(m)


def _fmt(v) -> str:
    return "(" + ", ".join(str(a) for a in v) + ")"


# ---------------------------------------------------------------------------
# layer maps and eigenvalues
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LayerMaps:
    blocks: tuple[Matrix, ...]
    adapted: Matrix  # full matrix in the lattice's adapted basis

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return tuple(b.rows for b in self.blocks)


def check_invariant(lattice: Lattice, phi: LieMorphism) -> None:
    for k, g in enumerate(lattice.generators()):
        img = phi(g)
        if not lattice.contains(img):
            raise NotInvariant(
                f"image of lattice generator {k + 1} has second-kind coordinates "
                f"{_fmt(lattice.to_second_kind(img))}, not integral",
                k + 1,
            )


def layer_maps(lattice: Lattice, phi: LieMorphism) -> LayerMaps:
    check_invariant(lattice, phi)
    A = lattice.adapted_matrix(phi.matrix)
    blocks = []
    for sl in lattice.layer_slices():
        B = A.block(sl.start, sl.stop, sl.start, sl.stop)
        assert B.is_integral(), "invariant lattice must give integral layer maps"
        blocks.append(B)
    return LayerMaps(tuple(blocks), A)


class Verdict(str, enum.Enum):
    NOT_SSI = "NOT_SSI"
    SSI_CERTIFIED = "SSI_CERTIFIED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class EigenReport:
    char_polys: tuple[Polynomial, ...]
    has_eigenvalue_one: bool
    has_root_of_unity: bool
    expanding: bool
    is_automorphism_of_lattice: bool
    abs_det: Fraction
    verdict: Verdict
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "char_polys": [p.format("t") for p in self.char_polys],
            "char_poly_coeffs": [[str(c) for c in p.coeffs] for p in self.char_polys],
            "has_eigenvalue_one": self.has_eigenvalue_one,
            "has_root_of_unity": self.has_root_of_unity,
            "expanding": self.expanding,
            "is_automorphism_of_lattice": self.is_automorphism_of_lattice,
            "abs_det": str(self.abs_det),
            "verdict": self.verdict.value,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> EigenReport:
        return cls(
            tuple(Polynomial([Fraction(c) for c in cs]) for cs in d["char_poly_coeffs"]),
            d["has_eigenvalue_one"],
            d["has_root_of_unity"],
            d["expanding"],
            d["is_automorphism_of_lattice"],
            Fraction(d["abs_det"]),
            Verdict(d["verdict"]),
            d.get("reason", ""),
        )


def classify(maps: LayerMaps) -> EigenReport:
    polys = tuple(charpoly(b) for b in maps.blocks)
    one = any(p(1) == 0 for p in polys)
    locs = [unit_disk_root_analysis(p) for p in polys]
    unity = any(loc.cyclotomic_factors for loc in locs)
    # all roots of p strictly outside the closed disk <=> reversed p has all roots inside
    expanding = all(p(0) != 0 and unit_disk_root_analysis(p.reverse()).inside == p.degree for p in polys)
    abs_det = Fraction(1)
    for b in maps.blocks:
        abs_det *= abs(b.det())
    integral = all(b.is_integral() for b in maps.blocks)
    auto = integral and abs_det == 1
    if one:
        verdict, reason = Verdict.NOT_SSI, "1 is an eigenvalue"
    elif auto:
        verdict, reason = Verdict.NOT_SSI, "automorphism of an infinite group (|det| = 1)"
    elif expanding:
        verdict, reason = Verdict.SSI_CERTIFIED, "all eigenvalues have modulus > 1"
    else:
        verdict, reason = Verdict.INCONCLUSIVE, "not expanding and no obstruction found"
    return EigenReport(polys, one, unity, expanding, auto, abs_det, verdict, reason)


def image_index(lattice: Lattice, phi: LieMorphism, k: int = 1):
    """[N : phi^k(N)] via induced sequences."""
    pk = phi**k
    return sublattice_index(lattice, [pk(g) for g in lattice.generators()])


# ---------------------------------------------------------------------------
# twisted coboundaries
# ---------------------------------------------------------------------------

def fixed_witness(phi: LieMorphism) -> GroupElement | None:
    """A nonzero x with phi(x) = x, scaled to integer coordinates, or None."""
    kernel = (phi.matrix - Matrix.identity(phi.dim)).nullspace()
    if not kernel:
        return None
    from .exact import primitive_integer_vector

    return tuple(Fraction(a) for a in primitive_integer_vector(kernel[0]))


def coboundary_solve(
    algebra: NilpotentLieAlgebra, phi: LieMorphism, x: Sequence[Fraction], method: str = "right"
) -> GroupElement:
    """The unique y with x = y * phi(y)^-1.

    Layer by layer along the lower central series: modulo gamma_{i+1} the
    unknown correction t in gamma_i is central, so the equation becomes the
    linear system (I - phi_i) t = z on that layer.  ``method`` picks whether
    corrections are multiplied on the right (y = y' t) or on the left
    (y = t y'); both must give the same y.
    """
    if method not in ("right", "left"):
        raise ValueError("method must be 'right' or 'left'")
    w = fixed_witness(phi)
    if w is not None:
        raise NoUniqueSolution("phi has eigenvalue 1; solutions are not unique", w)
    x = tuple(as_fraction(a) for a in x)
    d = algebra.dim
    flag = lower_central_series(algebra)
    P = flag.adapted_basis()
    ref = Lattice(algebra, P, check=False)
    A = ref.adapted_matrix(phi.matrix)
    y = tuple(Fraction(0) for _ in range(d))
    for sl in ref.layer_slices():
        if method == "right":
            # t phi(t)^-1 = y^-1 x phi(y)
            z = bch(algebra, bch(algebra, inverse(y), x), phi(y))
        else:
            # t (y phi(y)^-1) phi(t)^-1 = x, so t - phi t = x (y phi(y)^-1)^-1 mod gamma_{i+1}
            z = bch(algebra, x, inverse(bch(algebra, y, inverse(phi(y)))))
        zc = ref.adapted_coords(z)
        assert not any(zc[: sl.start]), "residual must lie in the current layer"
        block = Matrix.identity(len(sl)) - A.block(sl.start, sl.stop, sl.start, sl.stop)
        t_layer = block.solve(zc[sl.start : sl.stop])
        assert t_layer is not None
        t = [Fraction(0)] * d
        for k, a in zip(sl, t_layer):
            for j in range(d):
                t[j] += a * P[k, j]
        t = tuple(t)
        y = bch(algebra, y, t) if method == "right" else bch(algebra, t, y)
    assert bch(algebra, y, inverse(phi(y))) == x
    return y


# ---------------------------------------------------------------------------
# images and bounded intersections
# ---------------------------------------------------------------------------

def image_membership(lattice: Lattice, phi: LieMorphism, n: int, y: Sequence[Fraction]) -> bool:
    """Whether y lies in phi^n(N)."""
    if n < 1:
        raise ValueError("n must be positive")
    pre = (phi.matrix.inverse() ** n) @ tuple(as_fraction(a) for a in y)
    return lattice.contains(pre)


@dataclass(frozen=True)
class BoundedIntersection:
    elements: tuple[GroupElement, ...]
    depth: int
    ball: int

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "ball": self.ball,
            "elements": [[str(a) for a in e] for e in self.elements],
        }

    @classmethod
    def from_dict(cls, d: dict) -> BoundedIntersection:
        return cls(tuple(tuple(Fraction(a) for a in e) for e in d["elements"]), d["depth"], d["ball"])


def bounded_intersection(
    lattice: Lattice, phi: LieMorphism, depth: int = 8, ball: int = 16
) -> list[GroupElement]:
    """Lattice points with |second-kind coords| <= ball lying in phi^n(N) for all n <= depth.

    phi(N) is a subgroup of N, so the images are nested and the intersection
    is just phi^depth(N); its points in the ball are enumerated directly from
    an induced generating sequence.  Output is sorted by second-kind coordinates.
    """
    return [e for e in _intersection_points(lattice, phi, depth, ball)]


def bounded_intersection_report(lattice: Lattice, phi: LieMorphism, depth: int = 8, ball: int = 16) -> BoundedIntersection:
    return BoundedIntersection(tuple(bounded_intersection(lattice, phi, depth, ball)), depth, ball)


def _intersection_points(lattice: Lattice, phi: LieMorphism, depth: int, ball: int, prefix=None):
    check_invariant(lattice, phi)
    pk = phi**depth
    table = induced_sequence(lattice, [pk(g) for g in lattice.generators()])
    pts = list(coset_ball_points(lattice, table, ball, prefix))
    pts.sort(key=lattice.to_second_kind)
    return pts


def is_unipotent(m: Matrix) -> bool:
    n = m.rows
    return ((m - Matrix.identity(n)) ** n) == Matrix.zeros(n, n)
