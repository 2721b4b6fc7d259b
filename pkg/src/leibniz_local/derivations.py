"""Derivations: the derivation algebra as a nullspace, inner derivations, residuals."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import LeibnizAlgebra
from .exactlin import (
    ZERO,
    DimensionError,
    Echelon,
    SubspaceBasis,
    Vector,
    format_scalar,
    mat_mul,
    nullspace,
    parse_scalar,
    unit,
    vec,
)


@dataclass(frozen=True)
class LinearOperator:
    """Square matrix acting on coordinates; column j is the image of e_j."""

    dim: int
    matrix: tuple[Vector, ...]

    def __post_init__(self):
        m = tuple(vec(r) for r in self.matrix)
        if len(m) != self.dim or any(len(r) != self.dim for r in m):
            raise DimensionError(f"operator matrix must be {self.dim}x{self.dim}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def zero(cls, n: int) -> "LinearOperator":
        return cls(n, tuple((ZERO,) * n for _ in range(n)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "LinearOperator":
        n = len(columns)
        return cls(n, tuple(tuple(columns[j][k] for j in range(n)) for k in range(n)))

    @classmethod
    def from_images(cls, n: int, images: dict) -> "LinearOperator":
        """``images`` maps basis index to image vector; unspecified columns are zero."""
        cols = [images.get(j, (ZERO,) * n) for j in range(n)]
        return cls.from_columns(cols)

    @classmethod
    def from_flat(cls, n: int, flat: Sequence) -> "LinearOperator":
        return cls(n, tuple(tuple(flat[k * n:(k + 1) * n]) for k in range(n)))

    @property
    def flat(self) -> Vector:
        return tuple(c for row in self.matrix for c in row)

    @property
    def columns(self) -> list[Vector]:
        return [tuple(row[j] for row in self.matrix) for j in range(self.dim)]

    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.dim:
            raise DimensionError(f"vector length {len(v)} != {self.dim}")
        return tuple(sum((a * b for a, b in zip(row, v) if a and b), ZERO) for row in self.matrix)

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        return LinearOperator.from_flat(self.dim, [a + b for a, b in zip(self.flat, other.flat)])

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        return LinearOperator.from_flat(self.dim, [a - b for a, b in zip(self.flat, other.flat)])

    def scale(self, c) -> "LinearOperator":
        c = Fraction(c)
        return LinearOperator.from_flat(self.dim, [c * a for a in self.flat])

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        return LinearOperator(self.dim, tuple(mat_mul(self.matrix, other.matrix)))

    def commutator(self, other: "LinearOperator") -> "LinearOperator":
        return self @ other - other @ self

    def is_zero(self) -> bool:
        return not any(self.flat)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "columns": [[format_scalar(c) for c in col] for col in self.columns]}

    @classmethod
    def from_dict(cls, data: dict, normalize: bool = False) -> "LinearOperator":
        if set(data) != {"dim", "columns"}:
            raise ValueError("operator object needs exactly the fields dim, columns")
        cols = [[parse_scalar(s, normalize) for s in col] for col in data["columns"]]
        if len(cols) != data["dim"]:
            raise DimensionError(f"expected {data['dim']} columns, got {len(cols)}")
        return cls.from_columns(cols)


def combine(basis: Sequence[LinearOperator], coeffs: Sequence) -> LinearOperator:
    n = basis[0].dim
    flat = [ZERO] * (n * n)
    for op, c in zip(basis, coeffs):
        c = Fraction(c)
        if c:
            for idx, v in enumerate(op.flat):
                if v:
                    flat[idx] += c * v
    return LinearOperator.from_flat(n, flat)


@dataclass(frozen=True)
class OperatorSubspace:
    """Span of linearly independent operators, stored in RREF of the flattened matrices."""

    n: int
    basis: tuple[LinearOperator, ...]

    @classmethod
    def span(cls, n: int, ops: Iterable[LinearOperator]) -> "OperatorSubspace":
        ech = Echelon(n * n)
        for op in ops:
            ech.add(op.flat)
        return cls(n, tuple(LinearOperator.from_flat(n, r) for r in ech.dense_rows()))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def echelon(self) -> Echelon:
        ech = Echelon(self.n * self.n)
        for op in self.basis:
            ech.add(op.flat)
        return ech

    def contains(self, op: LinearOperator) -> bool:
        return self.echelon().contains(op.flat)

    def contains_space(self, other: "OperatorSubspace") -> bool:
        ech = self.echelon()
        return all(ech.contains(op.flat) for op in other.basis)

    def equals(self, other: "OperatorSubspace") -> bool:
        return self.dim == other.dim and self.contains_space(other)

    def as_subspace(self) -> SubspaceBasis:
        """The same space as flattened vectors in dimension n*n."""
        return SubspaceBasis(self.n * self.n, tuple(op.flat for op in self.basis))

    def combine(self, coeffs: Sequence) -> LinearOperator:
        if not self.basis:
            return LinearOperator.zero(self.n)
        return combine(self.basis, coeffs)

    def to_dict(self) -> dict:
        return {"n": self.n, "basis": [op.to_dict() for op in self.basis]}


def _derivation_rows(a: LeibnizAlgebra) -> list[dict[int, Fraction]]:
    """Constraint rows for ``D([e_i,e_j]) - [D e_i, e_j] - [e_i, D e_j] = 0``.

    Unknown ``D[k][l]`` (coefficient of e_k in D(e_l)) sits at column ``k*n + l``.
    Every ordered pair (i, j) contributes, including pairs with zero bracket.
    """
    n = a.dim
    # right[j][(k, p)] = c  means  [e_p, e_j] has coefficient c at e_k
    right = [{} for _ in range(n)]
    left = [{} for _ in range(n)]
    for (p, q), terms in a.structure.items():
        for k, c in terms:
            right[q][(k, p)] = c
            left[p][(k, q)] = c
    rows = []
    for i in range(n):
        for j in range(n):
            eq: dict[int, dict[int, Fraction]] = {}
            for k, c in a.structure.get((i, j), ()):
                for r in range(n):
                    cell = eq.setdefault(r, {})
                    col = r * n + k
                    cell[col] = cell.get(col, ZERO) + c
            for (r, p), c in right[j].items():
                cell = eq.setdefault(r, {})
                col = p * n + i
                cell[col] = cell.get(col, ZERO) - c
            for (r, q), c in left[i].items():
                cell = eq.setdefault(r, {})
                col = q * n + j
                cell[col] = cell.get(col, ZERO) - c
            for cell in eq.values():
                row = {col: v for col, v in cell.items() if v}
                if row:
                    rows.append(row)
    return rows


def derivation_space(a: LeibnizAlgebra) -> OperatorSubspace:
    n = a.dim
    ech = Echelon(n * n)
    for row in _derivation_rows(a):
        ech.add(row)
    ops = [LinearOperator.from_flat(n, v) for v in ech.null_basis()]
    return OperatorSubspace.span(n, ops)


def is_derivation(a: LeibnizAlgebra, t: LinearOperator) -> list[tuple[int, int, tuple]]:
    """Basis pairs (i, j) where the Leibniz rule fails, with the residual
    ``T([e_i,e_j]) - [T e_i, e_j] - [e_i, T e_j]``."""
    if t.dim != a.dim:
        raise DimensionError(f"operator dim {t.dim} != algebra dim {a.dim}")
    n = a.dim
    cols = t.columns
    out = []
    for i in range(n):
        ei = unit(n, i)
        for j in range(n):
            ej = unit(n, j)
            lhs = t.apply(a.basis_bracket(i, j))
            r1 = a.bracket(cols[i], ej)
            r2 = a.bracket(ei, cols[j])
            res = tuple(x - y - z for x, y, z in zip(lhs, r1, r2))
            if any(res):
                out.append((i, j, res))
    return out


def inner_derivation(a: LeibnizAlgebra, x: Sequence) -> LinearOperator:
    return LinearOperator(a.dim, tuple(a.right_mult_matrix(vec(x))))


def inner_derivation_space(a: LeibnizAlgebra) -> OperatorSubspace:
    return OperatorSubspace.span(a.dim, (inner_derivation(a, unit(a.dim, i)) for i in range(a.dim)))


def lie_closure_check(s: OperatorSubspace) -> bool:
    ech = s.echelon()
    for i, p in enumerate(s.basis):
        for q in s.basis[i + 1:]:
            if not ech.contains(p.commutator(q).flat):
                return False
    return True


def operator_to_json(op: LinearOperator) -> str:
    return json.dumps(op.to_dict())


def operator_from_json(text: str, normalize: bool = False) -> LinearOperator:
    return LinearOperator.from_dict(json.loads(text), normalize)
