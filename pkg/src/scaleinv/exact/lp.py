"""Positive solutions of homogeneous linear equalities.

``positive_lp_feasible`` decides whether ``A w = 0`` has a solution with every
``w_i >= 1``.  Equalities are eliminated by exact substitution, the remaining
inequalities by Fourier-Motzkin.  Every derived row remembers the multipliers
that produced it, so an infeasible answer comes with a Farkas-style
certificate: a combination ``y`` of the equalities whose coefficient vector
``y^T A`` is nonpositive and nonzero, which no positive ``w`` can annihilate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .linalg import Matrix, lcm_denominator


@dataclass(frozen=True)
class InfeasibilityCertificate:
    multipliers: tuple[Fraction, ...]  # one per equality
    combination: tuple[Fraction, ...]  # multipliers @ A, all <= 0, not all 0

    def check(self, equalities: Sequence[Sequence[int]]) -> bool:
        n = len(self.combination)
        combo = [Fraction(0)] * n
        for y, row in zip(self.multipliers, equalities):
            for i, a in enumerate(row):
                combo[i] += y * a
        return (
            tuple(combo) == self.combination
            and all(c <= 0 for c in combo)
            and any(c for c in combo)
        )


@dataclass(frozen=True)
class LPResult:
    feasible: bool
    weights: tuple[int, ...] | None = None
    certificate: InfeasibilityCertificate | None = None

    def __bool__(self) -> bool:
        return self.feasible


class _Row:
    """sum(coef * w) + const (>= 0 or == 0), with its provenance."""

    __slots__ = ("coef", "const", "eq_mult", "pos_mult")

    def __init__(self, coef, const, eq_mult, pos_mult):
        self.coef = list(coef)
        self.const = const
        self.eq_mult = list(eq_mult)
        self.pos_mult = list(pos_mult)

    def combine(self, a: Fraction, other: _Row, b: Fraction) -> _Row:
        return _Row(
            [a * x + b * y for x, y in zip(self.coef, other.coef)],
            a * self.const + b * other.const,
            [a * x + b * y for x, y in zip(self.eq_mult, other.eq_mult)],
            [a * x + b * y for x, y in zip(self.pos_mult, other.pos_mult)],
        )

    def key(self):
        lead = next((c for c in self.coef if c), None)
        s = abs(lead) if lead else (abs(self.const) or Fraction(1))
        return tuple(c / s for c in self.coef) + (self.const / s,)


def _certificate(row: _Row, equalities) -> InfeasibilityCertificate:
    # row == sum y_r (A_r w) + sum mu_i (w_i - 1) with zero w-part and const < 0
    y = tuple(row.eq_mult)
    n = len(row.coef)
    combo = [Fraction(0)] * n
    for m, eq in zip(y, equalities):
        for i, a in enumerate(eq):
            combo[i] += m * a
    return InfeasibilityCertificate(y, tuple(combo))


def _fourier_motzkin(equalities: Sequence[Sequence[int]], n: int):
    """Run elimination; return (certificate or None, levels for back-substitution)."""
    m = len(equalities)
    eqs = [
        _Row([Fraction(a) for a in eq], Fraction(0), [Fraction(int(r == k)) for k in range(m)], [Fraction(0)] * n)
        for r, eq in enumerate(equalities)
    ]
    ineqs = [
        _Row([Fraction(int(i == j)) for j in range(n)], Fraction(-1), [Fraction(0)] * m, [Fraction(int(i == k)) for k in range(n)])
        for i in range(n)
    ]
    substitutions = []  # (var, row) with row == 0 solved for var
    while eqs:
        row = eqs.pop()
        var = next((j for j, c in enumerate(row.coef) if c), None)
        if var is None:
            continue
        substitutions.append((var, row))
        c = row.coef[var]
        eqs = [e.combine(Fraction(1), row, -e.coef[var] / c) if e.coef[var] else e for e in eqs]
        ineqs = [q.combine(Fraction(1), row, -q.coef[var] / c) if q.coef[var] else q for q in ineqs]

    def contradiction(rows):
        return next((q for q in rows if not any(q.coef) and q.const < 0), None)

    levels = []
    remaining = [j for j in range(n) if all(j != v for v, _ in substitutions)]
    bad = contradiction(ineqs)
    for var in remaining:
        if bad is not None:
            break
        levels.append((var, ineqs))
        pos = [q for q in ineqs if q.coef[var] > 0]
        neg = [q for q in ineqs if q.coef[var] < 0]
        new = [q for q in ineqs if not q.coef[var]]
        seen = {q.key() for q in new}
        for p in pos:
            for q in neg:
                r = p.combine(-q.coef[var], q, p.coef[var])
                r.coef[var] = Fraction(0)
                k = r.key()
                if k not in seen:
                    seen.add(k)
                    new.append(r)
        # drop trivially true rows (no variables, const >= 0)
        ineqs = [q for q in new if any(q.coef) or q.const < 0]
        bad = contradiction(ineqs)
    if bad is not None:
        return _certificate(bad, equalities), None
    return None, (levels, substitutions)


def _back_substitute(levels, substitutions, n: int) -> list[Fraction]:
    w = [Fraction(0)] * n
    for var, rows in reversed(levels):
        lo, hi = None, None
        for q in rows:
            c = q.coef[var]
            if not c:
                continue
            rest = q.const + sum(q.coef[j] * w[j] for j in range(n) if j != var)
            bound = -rest / c
            if c > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        w[var] = lo if lo is not None else (hi if hi is not None else Fraction(1))
    for var, row in reversed(substitutions):
        rest = row.const + sum(row.coef[j] * w[j] for j in range(n) if j != var)
        w[var] = -rest / row.coef[var]
    return w


def _parametrize(equalities: Sequence[Sequence], n: int):
    if not equalities:
        return [], list(range(n)), None
    R, pivots = Matrix([list(e) for e in equalities], n).rref()
    free = [j for j in range(n) if j not in pivots]
    return list(pivots), free, R


def _compositions(k: int, total_max: int) -> Iterator[tuple[int, ...]]:
    """Vectors of k positive ints with sum <= total_max, by increasing sum."""
    def rec(k, s):
        if k == 1:
            yield (s,)
            return
        for first in range(1, s - k + 2):
            for rest in rec(k - 1, s - first):
                yield (first,) + rest

    if k == 0:
        yield ()
        return
    for s in range(k, total_max + 1):
        yield from rec(k, s)


def minimal_positive_solutions(
    equalities: Sequence[Sequence],
    n: int,
    bound: int,
    accept: Callable[[tuple[int, ...]], bool] | None = None,
) -> tuple[int, ...] | None:
    """Least-sum integer w >= 1 with A w = 0 (ties: lexicographically least).

    Only vectors whose free coordinates sum to at most ``bound`` are searched;
    the bound tightens as solutions are found.
    """
    pivots, free, R = _parametrize(equalities, n)
    best = None
    for fv in _compositions(len(free), bound):
        if best is not None and sum(fv) > best[0]:
            break
        w = [Fraction(0)] * n
        for j, v in zip(free, fv):
            w[j] = Fraction(v)
        ok = True
        for i, p in enumerate(pivots):
            val = -sum(R[i, j] * w[j] for j in free)
            if val.denominator != 1 or val < 1:
                ok = False
                break
            w[p] = val
        if not ok:
            continue
        cand = tuple(int(x) for x in w)
        if accept is not None and not accept(cand):
            continue
        key = (sum(cand), cand)
        if best is None or key < best:
            best = key
    return best[1] if best else None


def positive_lp_feasible(equalities: Sequence[Sequence[int]], n: int) -> LPResult:
    """Feasibility of {A w = 0, w >= 1}.

    On success the weights are the least-sum positive integer solution, which
    is automatically primitive.
    """
    equalities = [tuple(int(a) for a in e) for e in equalities]
    cert, data = _fourier_motzkin(equalities, n)
    if cert is not None:
        return LPResult(False, None, cert)
    levels, subs = data
    point = _back_substitute(levels, subs, n)
    scale = lcm_denominator(point)
    bound = int(sum(point) * scale)
    weights = minimal_positive_solutions(equalities, n, max(bound, n))
    assert weights is not None
    return LPResult(True, weights, None)
