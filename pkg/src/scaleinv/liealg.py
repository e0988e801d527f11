"""Rational nilpotent Lie algebras given by structure constants.

Basis indices are 0-based in code; reports and fixture files use 1-based
indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exact import Matrix, as_fraction, in_span, row_space
from .exact.linalg import Vector, extend_basis
from .exact.lp import InfeasibilityCertificate, minimal_positive_solutions, positive_lp_feasible


class AlgebraError(ValueError):
    pass


class NotNilpotent(AlgebraError):
    pass


class InvalidGrading(ValueError):
    pass


class NilpotentLieAlgebra:
    """Structure constants ``c[i, j][k]`` with ``[e_i, e_j] = sum_k c[i,j][k] e_k``.

    The constructor stores exactly what it is given; use :meth:`from_brackets`
    to fill in antisymmetric partners, and :func:`validate` to check the axioms.
    """

    def __init__(self, dim: int, constants: Mapping[tuple[int, int], Mapping[int, object]], name: str = ""):
        self.dim = dim
        self.name = name
        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), terms in constants.items():
            for k, c in terms.items():
                c = as_fraction(c)
                if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
                    raise AlgebraError(f"index out of range in bracket ({i + 1},{j + 1})->{k + 1}")
                if c:
                    table.setdefault((i, j), {})[k] = c
        self._table = table
        self._entries = tuple((i, j, k, c) for (i, j), t in sorted(table.items()) for k, c in sorted(t.items()))
        self._flag = None

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]], name: str = "") -> NilpotentLieAlgebra:
        """Build from [e_i, e_j] for some ordered pairs; [e_j, e_i] = -[e_i, e_j] is implied."""
        full: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), terms in brackets.items():
            for k, c in terms.items():
                full.setdefault((i, j), {})[k] = as_fraction(c)
                full.setdefault((j, i), {}).setdefault(k, -as_fraction(c))
        return cls(dim, full, name)

    @classmethod
    def abelian(cls, dim: int) -> NilpotentLieAlgebra:
        return cls(dim, {}, name=f"abelian Q^{dim}")

    def constant(self, i: int, j: int, k: int) -> Fraction:
        return self._table.get((i, j), {}).get(k, Fraction(0))

    def nonzero_constants(self) -> tuple[tuple[int, int, int, Fraction], ...]:
        return self._entries

    def __eq__(self, other) -> bool:
        return isinstance(other, NilpotentLieAlgebra) and self.dim == other.dim and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self.dim, self._entries))

    def __repr__(self) -> str:
        return f"NilpotentLieAlgebra(dim={self.dim}, name={self.name!r})"

    # brackets -------------------------------------------------------------
    def bracket(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
        out = [Fraction(0)] * self.dim
        for i, j, k, c in self._entries:
            a = u[i]
            if a:
                b = v[j]
                if b:
                    out[k] += c * a * b
        return tuple(out)

    def basis_vector(self, i: int) -> Vector:
        return tuple(Fraction(int(i == j)) for j in range(self.dim))

    def ad(self, u: Sequence[Fraction]) -> Matrix:
        return Matrix.from_columns([self.bracket(u, self.basis_vector(j)) for j in range(self.dim)], self.dim)

    def is_abelian(self) -> bool:
        return not self._entries

    def change_basis(self, P: Matrix) -> NilpotentLieAlgebra:
        """Same algebra in the basis given by the columns of P."""
        Pinv = P.inverse()
        cols = P.columns()
        consts = {}
        for i in range(self.dim):
            for j in range(self.dim):
                if i == j:
                    continue
                w = Pinv @ self.bracket(cols[i], cols[j])
                terms = {k: c for k, c in enumerate(w) if c}
                if terms:
                    consts[(i, j)] = terms
        return NilpotentLieAlgebra(self.dim, consts, self.name)

    @property
    def nilpotency_class(self) -> int:
        return lower_central_series(self).nilpotency_class

    def center(self) -> Matrix:
        """Canonical basis (rows) of the center."""
        if self.dim == 0:
            return Matrix.zeros(0, 0)
        rows = []
        for j in range(self.dim):
            rows.extend(self.ad(self.basis_vector(j)).tolist())
        # x central iff [x, e_j] = 0 for all j, i.e. -ad(e_j) x = 0
        null = Matrix(rows, self.dim).nullspace()
        return row_space(null, self.dim)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    nilpotency_class: int | None
    violations: list[str] = field(default_factory=list)
    jacobi_triple: tuple[int, int, int] | None = None  # 1-based
    antisymmetry_pair: tuple[int, int, int] | None = None  # 1-based (i, j, k)

    def __bool__(self) -> bool:
        return self.ok


def validate(algebra: NilpotentLieAlgebra) -> ValidationReport:
    """Exact check of antisymmetry, Jacobi and nilpotency."""
    d = algebra.dim
    violations = []
    anti = None
    for i in range(d):
        for j in range(i, d):
            for k in range(d):
                a, b = algebra.constant(i, j, k), algebra.constant(j, i, k)
                if a != -b:
                    if anti is None:
                        anti = (i + 1, j + 1, k + 1)
                    violations.append(
                        f"antisymmetry: c[{i + 1},{j + 1}]^{k + 1} = {a} but c[{j + 1},{i + 1}]^{k + 1} = {b}"
                    )
    jac = None
    if anti is None:
        E = [algebra.basis_vector(i) for i in range(d)]
        br = algebra.bracket
        for i, j, k in itertools.combinations(range(d), 3):
            s = [
                x + y + z
                for x, y, z in zip(br(E[i], br(E[j], E[k])), br(E[j], br(E[k], E[i])), br(E[k], br(E[i], E[j])))
            ]
            if any(s):
                jac = (i + 1, j + 1, k + 1)
                violations.append(f"jacobi fails on triple ({i + 1},{j + 1},{k + 1})")
                break
    cls = None
    if not violations:
        try:
            cls = lower_central_series(algebra).nilpotency_class
        except NotNilpotent as exc:
            violations.append(str(exc))
    return ValidationReport(not violations, cls, violations, jac, anti)


def checked(algebra: NilpotentLieAlgebra) -> NilpotentLieAlgebra:
    report = validate(algebra)
    if not report:
        raise AlgebraError("; ".join(report.violations))
    return algebra


# ---------------------------------------------------------------------------
# lower central series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Flag:
    """gamma_1 = n > gamma_2 > ... > gamma_{c+1} = 0 as canonical row bases."""

    subspaces: tuple[Matrix, ...]

    @property
    def layer_dims(self) -> tuple[int, ...]:
        dims = [s.rows for s in self.subspaces]
        return tuple(a - b for a, b in zip(dims, dims[1:]))

    @property
    def nilpotency_class(self) -> int:
        return len(self.subspaces) - 1

    def layer_offsets(self) -> list[int]:
        out, acc = [], 0
        for m in self.layer_dims:
            out.append(acc)
            acc += m
        return out

    def depth_of(self, v: Sequence[Fraction]) -> int:
        """Largest i (1-based) with v in gamma_i; class+1 for v = 0."""
        i = 0
        while i < len(self.subspaces) and in_span(self.subspaces[i], v):
            i += 1
        return i

    def adapted_basis(self) -> Matrix:
        """Rows: layer by layer, complements of gamma_{i+1} in gamma_i.

        Complements are picked from the canonical echelon rows of gamma_i, so
        they are standard basis vectors whenever possible.
        """
        rows: list[Vector] = []
        for cur, nxt in zip(self.subspaces, self.subspaces[1:]):
            rows.extend(extend_basis(nxt, cur))
        n = self.subspaces[0].cols
        return Matrix(rows, n) if rows else Matrix.zeros(0, n)


def lower_central_series(algebra: NilpotentLieAlgebra) -> Flag:
    if algebra._flag is not None:
        return algebra._flag
    d = algebra.dim
    E = [algebra.basis_vector(i) for i in range(d)]
    current = row_space(E, d)
    series = [current]
    while current.rows:
        nxt = row_space(
            (algebra.bracket(e, current.row(r)) for e in E for r in range(current.rows)), d
        )
        if nxt.rows == current.rows:
            raise NotNilpotent(f"lower central series stabilises at dimension {nxt.rows}")
        series.append(nxt)
        current = nxt
    algebra._flag = Flag(tuple(series))
    return algebra._flag


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------

def leibniz_defect(algebra: NilpotentLieAlgebra, D: Matrix) -> tuple[int, int] | None:
    """First basis pair (0-based) where D[x,y] != [Dx,y] + [x,Dy], else None."""
    d = algebra.dim
    cols = D.columns()
    for i in range(d):
        for j in range(i + 1, d):
            lhs = D @ algebra.bracket(algebra.basis_vector(i), algebra.basis_vector(j))
            rhs = [a + b for a, b in zip(algebra.bracket(cols[i], algebra.basis_vector(j)), algebra.bracket(algebra.basis_vector(i), cols[j]))]
            if tuple(lhs) != tuple(rhs):
                return (i, j)
    return None


def derivation_space(algebra: NilpotentLieAlgebra) -> list[Matrix]:
    """Basis of Der(n) as matrices acting on column vectors."""
    d = algebra.dim
    n_unknowns = d * d  # D[a][b] -> a*d + b
    rows = []
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(d):
                row = [Fraction(0)] * n_unknowns
                # (D [e_i, e_j])_k = sum_l c_ij^l D[k][l]
                for l in range(d):
                    c = algebra.constant(i, j, l)
                    if c:
                        row[k * d + l] += c
                # [D e_i, e_j]_k = sum_m D[m][i] c_mj^k ; [e_i, D e_j]_k = sum_m D[m][j] c_im^k
                for m in range(d):
                    c = algebra.constant(m, j, k)
                    if c:
                        row[m * d + i] -= c
                    c = algebra.constant(i, m, k)
                    if c:
                        row[m * d + j] -= c
                if any(row):
                    rows.append(row)
    if rows:
        null = Matrix(rows, n_unknowns).nullspace()
    else:
        null = [tuple(Fraction(int(r == c)) for c in range(n_unknowns)) for r in range(n_unknowns)]
    return [Matrix([v[a * d:(a + 1) * d] for a in range(d)], d) for v in null]


# ---------------------------------------------------------------------------
# gradings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grading:
    """Positive weights on a basis (columns of ``basis_change``, standard coords)."""

    weights: tuple[int, ...]
    basis_change: Matrix

    def __post_init__(self):
        if any(w < 1 for w in self.weights):
            raise InvalidGrading("weights must be positive integers")
        if self.basis_change.rows != len(self.weights) or not self.basis_change.is_square:
            raise InvalidGrading("basis_change must be square of size len(weights)")
        if self.basis_change.det() == 0:
            raise InvalidGrading("basis_change is singular")

    @classmethod
    def diagonal(cls, weights: Sequence[int]) -> Grading:
        return cls(tuple(int(w) for w in weights), Matrix.identity(len(weights)))

    def weight_spaces(self) -> dict[int, list[Vector]]:
        spaces: dict[int, list[Vector]] = {}
        for w, col in zip(self.weights, self.basis_change.columns()):
            spaces.setdefault(w, []).append(col)
        return dict(sorted(spaces.items()))

    def scaling(self, factor) -> Matrix:
        """The automorphism acting as factor**w on the weight-w space."""
        factor = as_fraction(factor)
        P = self.basis_change
        return P @ Matrix.diag([factor**w for w in self.weights]) @ P.inverse()

    def derivation(self) -> Matrix:
        P = self.basis_change
        return P @ Matrix.diag(list(self.weights)) @ P.inverse()


def verify_grading(algebra: NilpotentLieAlgebra, grading: Grading) -> bool:
    if len(grading.weights) != algebra.dim:
        raise InvalidGrading("grading has the wrong number of weights")
    local = algebra.change_basis(grading.basis_change)
    w = grading.weights
    return all(w[k] == w[i] + w[j] for i, j, k, _ in local.nonzero_constants())


def grading_constraints(algebra: NilpotentLieAlgebra) -> list[tuple[int, ...]]:
    """One equality w_i + w_j - w_k = 0 per nonzero c_ij^k with i < j."""
    seen = set()
    out = []
    for i, j, k, _ in algebra.nonzero_constants():
        if i > j:
            i, j = j, i
        key = (i, j, k)
        if key in seen:
            continue
        seen.add(key)
        row = [0] * algebra.dim
        row[i] += 1
        row[j] += 1
        row[k] -= 1
        out.append(tuple(row))
    return out


def _twin_pairs(algebra: NilpotentLieAlgebra) -> list[tuple[int, int]]:
    """Pairs (i, j) swapped by a signed-permutation automorphism fixing the rest up to sign."""
    d = algebra.dim
    entries = algebra.nonzero_constants()
    pairs = []
    for i, j in itertools.combinations(range(d), 2):
        perm = list(range(d))
        perm[i], perm[j] = j, i
        for signs in itertools.product((1, -1), repeat=d):
            # sigma(e_a) = s_a e_perm(a) is an automorphism iff
            # c_ab^k s_k = s_a s_b c_{perm a, perm b}^{perm k} for every triple
            ok = all(
                c * signs[k] == signs[a] * signs[b] * algebra.constant(perm[a], perm[b], perm[k])
                for a, b, k, c in entries
            ) and all(
                algebra.constant(perm[a], perm[b], perm[k]) * signs[perm[k]]
                == signs[perm[a]] * signs[perm[b]] * c
                for a, b, k, c in entries
            )
            if ok:
                pairs.append((i, j))
                break
    return pairs


def _classes(d: int, pairs) -> list[int]:
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return [find(x) for x in range(d)]


@dataclass(frozen=True)
class GradingSearch:
    grading: Grading | None
    certificate: InfeasibilityCertificate | None = None
    constraints: tuple[tuple[int, ...], ...] = ()

    @property
    def found(self) -> bool:
        return self.grading is not None


def find_positive_grading(algebra: NilpotentLieAlgebra) -> GradingSearch:
    """Search for a positive grading diagonal in the given basis.

    Basis vectors swapped by a signed-permutation automorphism get equal
    weight; all other pairs get distinct weights unless the constraints force
    equality.  Among such weight vectors the one with least sum (then
    lexicographically least) is returned.  NOT_FOUND (``grading is None``)
    only says no grading is diagonal in this basis.
    """
    d = algebra.dim
    eqs = grading_constraints(algebra)
    lp = positive_lp_feasible(eqs, d)
    if not lp.feasible:
        return GradingSearch(None, lp.certificate, tuple(eqs))
    cls = _classes(d, _twin_pairs(algebra))
    tied = list(eqs)
    for x in range(d):
        if cls[x] != x:
            row = [0] * d
            row[x] += 1
            row[cls[x]] -= 1
            tied.append(tuple(row))
    # pairs forced equal on the tied solution space need not be separated
    null = Matrix([list(r) for r in tied], d).nullspace() if tied else [
        tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)
    ]
    separate = [
        (a, b)
        for a, b in itertools.combinations(range(d), 2)
        if cls[a] != cls[b] and any(v[a] != v[b] for v in null)
    ]

    def distinct(w):
        return all(w[a] != w[b] for a, b in separate)

    bound = max(sum(lp.weights), d)
    weights = None
    for _ in range(12):
        weights = minimal_positive_solutions(tied, d, bound, distinct)
        if weights is not None:
            break
        bound *= 2
    if weights is None:
        weights = minimal_positive_solutions(tied, d, bound) or lp.weights
    grading = Grading.diagonal(weights)
    assert verify_grading(algebra, grading)
    return GradingSearch(grading, None, tuple(eqs))


# ---------------------------------------------------------------------------
# characteristic nilpotence
# ---------------------------------------------------------------------------

def _padd(p: dict, q: dict) -> dict:
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def _pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            s = out.get(m, 0) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


@dataclass(frozen=True)
class CharNilpotence:
    """Outcome of the trace-power test on a generic derivation."""

    all_nilpotent: bool
    derivation_dim: int
    checked_powers: int
    witness_power: int | None = None  # k with tr(D(t)^k) != 0
    witness_term: tuple[tuple[int, ...], Fraction] | None = None  # (exponents, coefficient)

    def __bool__(self) -> bool:
        return self.all_nilpotent


def all_derivations_nilpotent(algebra: NilpotentLieAlgebra) -> CharNilpotence:
    """Symbolically expand tr((sum t_i D_i)^k), k = 1..dim, over a basis D_i of Der(n).

    Every derivation is nilpotent iff all these polynomials vanish.
    """
    basis = derivation_space(algebra)
    s = len(basis)
    d = algebra.dim
    if d == 0:
        return CharNilpotence(True, s, 0)
    # generic derivation as a matrix of linear polynomials {exponent tuple: coeff}
    gen = [[{} for _ in range(d)] for _ in range(d)]
    for idx, D in enumerate(basis):
        mono = tuple(int(t == idx) for t in range(s))
        for a in range(d):
            for b in range(d):
                if D[a, b]:
                    gen[a][b] = _padd(gen[a][b], {mono: D[a, b]})
    power = gen
    for k in range(1, d + 1):
        tr: dict = {}
        for a in range(d):
            tr = _padd(tr, power[a][a])
        if tr:
            mono, coeff = min(tr.items())
            return CharNilpotence(False, s, k, k, (mono, coeff))
        if k == d:
            break
        if not any(power[a][b] for a in range(d) for b in range(d)):
            return CharNilpotence(True, s, d)
        nxt = [[{} for _ in range(d)] for _ in range(d)]
        for a in range(d):
            for c in range(d):
                if not power[a][c]:
                    continue
                for b in range(d):
                    if gen[c][b]:
                        nxt[a][b] = _padd(nxt[a][b], _pmul(power[a][c], gen[c][b]))
        power = nxt
    return CharNilpotence(True, s, d)
