from __future__ import annotations

import random
from fractions import Fraction

import pytest

from scaleinv.exact import Matrix
from scaleinv.fixtures import load_fixture
from scaleinv.liealg import NilpotentLieAlgebra
from scaleinv.malcev import Lattice

F = Fraction


def heisenberg() -> NilpotentLieAlgebra:
    return NilpotentLieAlgebra.from_brackets(3, {(0, 1): {2: 1}}, "h3")


def filiform(n: int) -> NilpotentLieAlgebra:
    return NilpotentLieAlgebra.from_brackets(n, {(0, k): {k + 1: 1} for k in range(1, n - 1)}, f"L{n}")


def l4_lattice(alg=None) -> Lattice:
    return Lattice(alg or filiform(4), Matrix.diag([1, 1, 1, F(1, 2)]))


def l5_lattice(alg=None) -> Lattice:
    return Lattice(alg or filiform(5), Matrix.diag([1, 1, 1, F(1, 2), F(1, 6)]))


def rand_frac(rng: random.Random, num=6, den=4) -> Fraction:
    return F(rng.randint(-num, num), rng.randint(1, den))


def rand_vec(rng: random.Random, d: int, num=6, den=4) -> tuple:
    return tuple(rand_frac(rng, num, den) for _ in range(d))


CATALOG_ALGEBRAS = ["abelian", "h3", "filiform_l4", "filiform_l5", "dixmier_lister"]


@pytest.fixture
def h3():
    return heisenberg()


@pytest.fixture
def l4():
    return filiform(4)


@pytest.fixture
def rng():
    return random.Random(20240611)


def catalog_algebra(name: str) -> NilpotentLieAlgebra:
    return load_fixture(f"fixtures/{name}").algebra()
