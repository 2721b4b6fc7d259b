"""Exact rational linear algebra over ``fractions.Fraction``.

Matrices are plain sequences of rows. Elimination runs on sparse dict rows
internally, since the constraint systems built elsewhere in the package are
tall and very sparse.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Vector = tuple[Fraction, ...]
Matrix = Sequence[Sequence[Fraction]]

ZERO = Fraction(0)
ONE = Fraction(1)

_SCALAR_RE = re.compile(r"^-?\d+(/\d+)?$")


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_scalar(x, normalize=True)
    return Fraction(x)


def vec(values: Iterable) -> Vector:
    return tuple(to_fraction(v) for v in values)


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit(n: int, i: int) -> Vector:
    return tuple(ONE if k == i else ZERO for k in range(n))


def format_scalar(x: Fraction) -> str:
    return str(x)


def parse_scalar(text: str, normalize: bool = False) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``.

    In strict mode (the default) only the canonical spelling is accepted:
    lowest terms, positive denominator, and no ``/1``.
    """
    if not isinstance(text, str) or not _SCALAR_RE.match(text):
        raise ValueError(f"malformed scalar {text!r}")
    if "/" in text and int(text.split("/")[1]) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    value = Fraction(text)
    if not normalize and str(value) != text:
        raise ValueError(f"non-canonical scalar {text!r} (canonical form {value})")
    return value


def _to_sparse(row: Sequence[Fraction]) -> dict[int, Fraction]:
    return {j: Fraction(v) for j, v in enumerate(row) if v}


class Echelon:
    """Incrementally maintained reduced row echelon basis.

    Every stored row has a leading 1 at its pivot and zeros in all other
    pivot columns, so reducing a new row is a single pass.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, dict[int, Fraction]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, row: dict[int, Fraction]) -> dict[int, Fraction]:
        row = dict(row)
        for p in [c for c in row if c in self.rows]:
            coef = row.get(p)
            if not coef:
                continue
            for c, v in self.rows[p].items():
                nv = row.get(c, ZERO) - coef * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
        return row

    def add(self, row) -> bool:
        """Insert a row; return False if it was already in the span."""
        if not isinstance(row, dict):
            if len(row) != self.ncols:
                raise DimensionError(f"row length {len(row)} != {self.ncols}")
            row = _to_sparse(row)
        row = self.reduce(row)
        if not row:
            return False
        p = min(row)
        inv = 1 / row[p]
        row = {c: v * inv for c, v in row.items()}
        for other in self.rows.values():
            coef = other.get(p)
            if coef:
                for c, v in row.items():
                    nv = other.get(c, ZERO) - coef * v
                    if nv:
                        other[c] = nv
                    else:
                        other.pop(c, None)
        self.rows[p] = row
        return True

    def contains(self, row: Sequence[Fraction]) -> bool:
        return not self.reduce(_to_sparse(row))

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def dense_rows(self) -> list[Vector]:
        out = []
        for p in self.pivots():
            r = self.rows[p]
            out.append(tuple(r.get(c, ZERO) for c in range(self.ncols)))
        return out

    def null_basis(self) -> list[Vector]:
        free = [c for c in range(self.ncols) if c not in self.rows]
        basis = []
        for f in free:
            v = [ZERO] * self.ncols
            v[f] = ONE
            for p, r in self.rows.items():
                coef = r.get(f)
                if coef:
                    v[p] = -coef
            basis.append(tuple(v))
        return basis


def _ncols(m: Matrix, ncols: Optional[int]) -> int:
    if ncols is not None:
        return ncols
    if not m:
        raise DimensionError("empty matrix needs an explicit column count")
    return len(m[0])


def rref(m: Matrix, ncols: Optional[int] = None) -> tuple[list[Vector], list[int], int]:
    """Return ``(R, pivots, rank)``; R has the same row count as ``m``."""
    n = _ncols(m, ncols)
    ech = Echelon(n)
    for row in m:
        ech.add(row)
    rows = ech.dense_rows()
    rows += [zeros(n)] * (len(m) - len(rows))
    return rows, ech.pivots(), ech.rank


def rank(m: Matrix, ncols: Optional[int] = None) -> int:
    return rref(m, ncols)[2]


def mat_vec(m: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum((a * b for a, b in zip(row, v) if a and b), ZERO) for row in m)


def mat_mul(a: Matrix, b: Matrix) -> list[Vector]:
    bt = list(zip(*b))
    return [tuple(sum((x * y for x, y in zip(row, col) if x and y), ZERO) for col in bt) for row in a]


def identity(n: int) -> list[Vector]:
    return [unit(n, i) for i in range(n)]


@dataclass(frozen=True)
class SubspaceBasis:
    ambient_dim: int
    vectors: tuple[Vector, ...]

    def __post_init__(self):
        for v in self.vectors:
            if len(v) != self.ambient_dim:
                raise DimensionError(f"vector of length {len(v)} in ambient {self.ambient_dim}")

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> "SubspaceBasis":
        """Independent basis of the span, in canonical RREF form."""
        ech = Echelon(ambient_dim)
        for v in vectors:
            ech.add(vec(v))
        return cls(ambient_dim, tuple(ech.dense_rows()))

    def echelon(self) -> Echelon:
        ech = Echelon(self.ambient_dim)
        for v in self.vectors:
            ech.add(v)
        return ech

    def contains_vector(self, v: Sequence[Fraction]) -> bool:
        return self.echelon().contains(vec(v))


def nullspace(m: Matrix, ncols: Optional[int] = None) -> SubspaceBasis:
    n = _ncols(m, ncols)
    ech = Echelon(n)
    for row in m:
        ech.add(row)
    return SubspaceBasis(n, tuple(ech.null_basis()))


def solve(m: Matrix, b: Sequence[Fraction], ncols: Optional[int] = None) -> Optional[Vector]:
    """One exact solution of ``m x = b`` with free variables set to zero.

    Returns None when the system is inconsistent.
    """
    if len(b) != len(m):
        raise DimensionError(f"rhs length {len(b)} != {len(m)} rows")
    n = _ncols(m, ncols)
    ech = Echelon(n + 1)
    for row, rhs in zip(m, b):
        if len(row) != n:
            raise DimensionError(f"row length {len(row)} != {n}")
        ech.add(tuple(row) + (Fraction(rhs),))
    if n in ech.rows:
        return None
    x = [ZERO] * n
    for p, r in ech.rows.items():
        x[p] = r.get(n, ZERO)
    return tuple(x)


def _check_ambient(a: SubspaceBasis, b: SubspaceBasis) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError(f"ambient dims differ: {a.ambient_dim} vs {b.ambient_dim}")


def subspace_contains(outer: SubspaceBasis, inner: SubspaceBasis) -> bool:
    _check_ambient(outer, inner)
    ech = outer.echelon()
    return all(ech.contains(v) for v in inner.vectors)


def subspace_equal(a: SubspaceBasis, b: SubspaceBasis) -> bool:
    _check_ambient(a, b)
    return a.dim == b.dim and subspace_contains(a, b)


def subspace_sum(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    _check_ambient(a, b)
    return SubspaceBasis.span(a.ambient_dim, a.vectors + b.vectors)


def annihilator(s: SubspaceBasis) -> list[Vector]:
    """Functionals vanishing on ``s``; their common kernel is exactly ``s``."""
    return list(nullspace(list(s.vectors), s.ambient_dim).vectors)
