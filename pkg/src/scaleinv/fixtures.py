"""Plain-text fixture files and the bundled catalog.

A fixture is a sequence of ``[section]`` blocks after a ``format = 1``
header.  Comments start with ``#``.  Numbers are exact: integers or ``p/q``.
Indices in the file are 1-based.  Example::

    format = 1
    name = h3

    [algebra]
    dim = 3
    bracket 1 2 3 1        # [e1, e2] = 1 * e3

    [morphism]
    2 0 0
    0 2 0
    0 0 4

Sections: ``algebra``, ``lattice`` (adapted basis rows), ``morphism``,
``grading`` (``weights = ...`` and optionally ``basis_change`` followed by
rows), ``finite_group`` (``elements = ...`` then one table row per element),
``action`` (``element <name>`` then matrix rows), ``vngroup``
(``coset <name> = coords``) and ``generators`` (``a = coords @ <name>``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .exact import Matrix
from .liealg import Grading, NilpotentLieAlgebra
from .malcev import Lattice
from .morphisms import LieMorphism, validate_morphism
from .vngroups import Action, FiniteGroup, SemidirectElement, VNGroup, validate_action

FORMAT_VERSION = 1
SECTIONS = ("algebra", "lattice", "morphism", "grading", "finite_group", "action", "vngroup", "generators")
CATALOG_SUFFIX = ".fixture"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = ""):
        where = f"{source}:{line}: " if line is not None else (f"{source}: " if source else "")
        super().__init__(where + message)
        self.line = line


_NUM = re.compile(r"^[+-]?\d+(/\d+)?$")


def _number(tok: str, line: int, source: str) -> Fraction:
    if not _NUM.match(tok):
        raise ParseError(f"not an exact rational literal: {tok!r}", line, source)
    try:
        return Fraction(tok)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {tok!r}", line, source) from None


def _numbers(text: str, line: int, source: str) -> list[Fraction]:
    return [_number(t, line, source) for t in text.replace(",", " ").split()]


def _int(tok: str, line: int, source: str) -> int:
    v = _number(tok, line, source)
    if v.denominator != 1:
        raise ParseError(f"expected an integer, got {tok}", line, source)
    return int(v)


@dataclass
class Fixture:
    """Raw parsed content; domain objects are built (and validated) on demand."""

    name: str
    source: str
    dim: int | None = None
    brackets: dict = field(default_factory=dict)  # (i, j) -> {k: c}, 0-based
    lattice_rows: list | None = None
    morphism_rows: list | None = None
    weights: tuple[int, ...] | None = None
    basis_change_rows: list | None = None
    group_elements: tuple[str, ...] | None = None
    group_table: list | None = None
    action_rows: dict = field(default_factory=dict)  # name -> rows
    cosets: dict = field(default_factory=dict)  # name -> coords
    generators: dict = field(default_factory=dict)  # name -> (coords, element name)
    lines: dict = field(default_factory=dict)  # section -> first line number

    # -- domain objects ---------------------------------------------------
    def algebra(self) -> NilpotentLieAlgebra:
        if self.dim is None:
            raise ParseError("missing [algebra] section", None, self.source)
        full = {key: dict(terms) for key, terms in self.brackets.items()}
        for (i, j), terms in self.brackets.items():
            if (j, i) not in self.brackets:  # antisymmetric partner implied
                full[(j, i)] = {k: -c for k, c in terms.items()}
        return NilpotentLieAlgebra(self.dim, full, self.name)

    def lattice(self, algebra: NilpotentLieAlgebra | None = None) -> Lattice:
        algebra = algebra or self.algebra()
        if self.lattice_rows is None:
            return Lattice.standard(algebra)
        return Lattice(algebra, Matrix(self.lattice_rows, algebra.dim))

    def morphism(self, algebra: NilpotentLieAlgebra | None = None) -> LieMorphism:
        algebra = algebra or self.algebra()
        if self.morphism_rows is None:
            raise ParseError("missing [morphism] section", None, self.source)
        return validate_morphism(algebra, Matrix(self.morphism_rows, algebra.dim))

    def grading(self) -> Grading | None:
        if self.weights is None:
            return None
        if self.basis_change_rows is None:
            return Grading.diagonal(self.weights)
        return Grading(self.weights, Matrix(self.basis_change_rows, len(self.weights)))

    def finite_group(self) -> FiniteGroup:
        if self.group_elements is None:
            return FiniteGroup.trivial()
        names = self.group_elements
        table = tuple(tuple(names.index(n) for n in row) for row in self.group_table)
        return FiniteGroup(table, names)

    def action(self, algebra: NilpotentLieAlgebra | None = None) -> Action:
        algebra = algebra or self.algebra()
        F = self.finite_group()
        d = algebra.dim
        mats = []
        for name in F.names:
            rows = self.action_rows.get(name)
            mats.append(Matrix.identity(d) if rows is None else Matrix(rows, d))
        return validate_action(algebra, F, mats)

    def group(self) -> VNGroup:
        alg = self.algebra()
        lat = self.lattice(alg)
        act = self.action(alg)
        F = act.group
        cosets = {F.index(n): tuple(x) for n, x in self.cosets.items()}
        if self.group_elements is None:
            cosets = {0: tuple(Fraction(0) for _ in range(alg.dim))}
        gens = {}
        for name, (x, fname) in self.generators.items():
            gens[name] = SemidirectElement(tuple(x), F.index(fname))
        return VNGroup(alg, lat, act, cosets, gens)

    def has(self, section: str) -> bool:
        return section in self.lines


def parse_fixture(text: str, source: str = "<string>") -> Fixture:
    fx = Fixture(name=Path(source).stem if source and not source.startswith("<") else "", source=source)
    section = None
    header_seen = False
    pending_action = None
    in_basis_change = False
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            m = re.fullmatch(r"\[(\w+)\]", line)
            if not m or m.group(1) not in SECTIONS:
                raise ParseError(f"unknown section {line}", no, source)
            if not header_seen:
                raise ParseError("missing 'format = 1' header", no, source)
            section = m.group(1)
            if section in fx.lines:
                raise ParseError(f"duplicate section [{section}]", no, source)
            fx.lines[section] = no
            pending_action = None
            in_basis_change = False
            continue
        if section is None:
            key, _, val = (s.strip() for s in line.partition("="))
            if key == "format":
                if val != str(FORMAT_VERSION):
                    raise ParseError(f"unsupported format version {val!r}", no, source)
                header_seen = True
            elif key == "name":
                fx.name = val
            else:
                raise ParseError(f"unexpected header line {line!r}", no, source)
            continue

        if section == "algebra":
            toks = line.replace("=", " ").split()
            if toks[0] == "dim":
                if len(toks) != 2:
                    raise ParseError("expected 'dim = n'", no, source)
                fx.dim = _int(toks[1], no, source)
                if fx.dim < 1:
                    raise ParseError("dimension must be positive", no, source)
            elif toks[0] == "bracket":
                if fx.dim is None:
                    raise ParseError("'dim' must come before brackets", no, source)
                if len(toks) != 5:
                    raise ParseError("expected 'bracket i j k value'", no, source)
                i, j, k = (_int(t, no, source) for t in toks[1:4])
                c = _number(toks[4], no, source)
                for idx in (i, j, k):
                    if not 1 <= idx <= fx.dim:
                        raise ParseError(f"index {idx} out of range 1..{fx.dim}", no, source)
                i, j, k = i - 1, j - 1, k - 1
                fx.brackets.setdefault((i, j), {})[k] = c
            else:
                raise ParseError(f"unknown algebra entry {toks[0]!r}", no, source)
        elif section in ("lattice", "morphism"):
            attr = section + "_rows"
            rows = getattr(fx, attr) or []
            rows.append(_numbers(line, no, source))
            setattr(fx, attr, rows)
        elif section == "grading":
            if line.startswith("weights"):
                _, _, val = line.partition("=")
                fx.weights = tuple(_int(t, no, source) for t in val.split())
                in_basis_change = False
            elif line == "basis_change":
                in_basis_change = True
                fx.basis_change_rows = []
            elif in_basis_change:
                fx.basis_change_rows.append(_numbers(line, no, source))
            else:
                raise ParseError(f"unexpected grading line {line!r}", no, source)
        elif section == "finite_group":
            if line.startswith("elements"):
                _, _, val = line.partition("=")
                fx.group_elements = tuple(val.split())
                fx.group_table = []
            else:
                if fx.group_elements is None:
                    raise ParseError("'elements = ...' must come first", no, source)
                row = line.split()
                unknown = [t for t in row if t not in fx.group_elements]
                if unknown or len(row) != len(fx.group_elements):
                    raise ParseError(f"bad table row {line!r}", no, source)
                fx.group_table.append(row)
        elif section == "action":
            toks = line.split()
            if toks[0] == "element":
                if len(toks) != 2:
                    raise ParseError("expected 'element <name>'", no, source)
                pending_action = toks[1]
                fx.action_rows[pending_action] = []
            else:
                if pending_action is None:
                    raise ParseError("matrix rows need a preceding 'element <name>'", no, source)
                fx.action_rows[pending_action].append(_numbers(line, no, source))
        elif section == "vngroup":
            m = re.fullmatch(r"coset\s+(\S+)\s*=\s*(.+)", line)
            if not m:
                raise ParseError("expected 'coset <element> = coords'", no, source)
            fx.cosets[m.group(1)] = _numbers(m.group(2), no, source)
        elif section == "generators":
            m = re.fullmatch(r"(\w+)\s*=\s*(.+?)\s*@\s*(\S+)", line)
            if not m:
                raise ParseError("expected '<name> = coords @ <element>'", no, source)
            fx.generators[m.group(1)] = (_numbers(m.group(2), no, source), m.group(3))
    if not header_seen:
        raise ParseError("missing 'format = 1' header", None, source)
    _check_shapes(fx)
    return fx


def _check_shapes(fx: Fixture) -> None:
    d = fx.dim
    src = fx.source

    def square(rows, what, n):
        if rows is None:
            return
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ParseError(f"[{what}] must be a {n}x{n} matrix", fx.lines.get(what), src)

    if d is not None:
        square(fx.lattice_rows, "lattice", d)
        square(fx.morphism_rows, "morphism", d)
        for name, rows in fx.action_rows.items():
            square(rows, "action", d)
        for name, x in fx.cosets.items():
            if len(x) != d:
                raise ParseError(f"coset {name} needs {d} coordinates", fx.lines.get("vngroup"), src)
        for name, (x, _) in fx.generators.items():
            if len(x) != d:
                raise ParseError(f"generator {name} needs {d} coordinates", fx.lines.get("generators"), src)
        if fx.weights is not None and len(fx.weights) != d:
            raise ParseError(f"grading needs {d} weights", fx.lines.get("grading"), src)
    if fx.weights is not None:
        square(fx.basis_change_rows, "grading", len(fx.weights))
    if fx.group_elements is not None and len(fx.group_table) != len(fx.group_elements):
        raise ParseError("finite group table must have one row per element", fx.lines.get("finite_group"), src)
    names = set(fx.group_elements or ())
    for n in list(fx.action_rows) + list(fx.cosets) + [f for _, f in fx.generators.values()]:
        if fx.group_elements is None and n == "e":
            continue
        if n not in names:
            raise ParseError(f"unknown finite group element {n!r}", None, src)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def catalog_names() -> list[str]:
    root = resources.files("scaleinv") / "fixtures"
    return sorted(p.name[: -len(CATALOG_SUFFIX)] for p in root.iterdir() if p.name.endswith(CATALOG_SUFFIX))


def resolve(path: str) -> tuple[str, str]:
    """(text, source) for a file path or a catalog reference ``fixtures/<name>``."""
    p = Path(path)
    if p.is_file():
        return p.read_text(), str(p)
    name = path
    if name.startswith("fixtures/"):
        name = name[len("fixtures/") :]
    if name.endswith(CATALOG_SUFFIX):
        name = name[: -len(CATALOG_SUFFIX)]
    res = resources.files("scaleinv") / "fixtures" / (name + CATALOG_SUFFIX)
    if "/" not in name and res.is_file():
        return res.read_text(), f"fixtures/{name}"
    raise FileNotFoundError(f"no fixture file or catalog entry named {path!r}")


def load_fixture(path: str) -> Fixture:
    text, source = resolve(path)
    fx = parse_fixture(text, source)
    if not fx.name:
        fx.name = Path(source).name
    return fx
