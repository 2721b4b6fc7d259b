"""Leibniz algebras given by structure constants.

Convention: the bracket satisfies the right Leibniz identity
``[x,[y,z]] = [[x,y],z] - [[x,z],y]`` and ``ad_x`` is right multiplication,
``ad_x(z) = [z, x]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .exactlin import (
    ZERO,
    DimensionError,
    Echelon,
    SubspaceBasis,
    Vector,
    mat_mul,
    rank,
    unit,
    vec,
    zeros,
)

Terms = tuple[tuple[int, Fraction], ...]


class NotNilpotentError(ValueError):
    pass


@dataclass(frozen=True)
class LeibnizAlgebra:
    dim: int
    basis_names: tuple[str, ...]
    structure: Mapping[tuple[int, int], Terms]
    family: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.basis_names) != self.dim:
            raise DimensionError(f"{len(self.basis_names)} basis names for dim {self.dim}")
        clean = {}
        for (i, j), terms in self.structure.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise IndexError(f"bracket index ({i},{j}) out of range for dim {self.dim}")
            ks = [k for k, _ in terms]
            if len(set(ks)) != len(ks):
                raise ValueError(f"duplicate target index in bracket ({i},{j})")
            kept = []
            for k, c in sorted(terms):
                if not 0 <= k < self.dim:
                    raise IndexError(f"target index {k} out of range in bracket ({i},{j})")
                c = Fraction(c)
                if c:
                    kept.append((k, c))
            if kept:
                clean[(i, j)] = tuple(kept)
        object.__setattr__(self, "structure", dict(sorted(clean.items())))

    @classmethod
    def from_brackets(cls, names: Sequence[str], brackets: Mapping[tuple[int, int], Mapping[int, object]],
                      family: Optional[dict] = None) -> "LeibnizAlgebra":
        """Build from ``{(i, j): {k: coeff}}``."""
        structure = {ij: tuple((k, Fraction(c)) for k, c in t.items()) for ij, t in brackets.items()}
        return cls(len(names), tuple(names), structure, family)

    @classmethod
    def abelian(cls, n: int) -> "LeibnizAlgebra":
        return cls(n, tuple(f"a{i + 1}" for i in range(n)), {}, {"family": "Custom"})

    def index(self, name: str) -> int:
        return self.basis_names.index(name)

    def basis_vector(self, name_or_index) -> Vector:
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        return unit(self.dim, i)

    def element(self, coords: Mapping[str, object]) -> Vector:
        v = [ZERO] * self.dim
        for name, c in coords.items():
            v[self.index(name)] += Fraction(c)
        return tuple(v)

    def basis_bracket(self, i: int, j: int) -> Vector:
        out = [ZERO] * self.dim
        for k, c in self.structure.get((i, j), ()):
            out[k] = c
        return tuple(out)

    def bracket(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vector:
        if len(x) != self.dim or len(y) != self.dim:
            raise DimensionError(f"bracket operands must have length {self.dim}")
        out = [ZERO] * self.dim
        for (i, j), terms in self.structure.items():
            s = x[i] * y[j] if x[i] and y[j] else ZERO
            if s:
                for k, c in terms:
                    out[k] += s * c
        return tuple(out)

    def right_mult_matrix(self, x: Sequence[Fraction]) -> list[Vector]:
        """Matrix of ``ad_x``; column j is ``[e_j, x]``."""
        cols = [self.bracket(unit(self.dim, j), x) for j in range(self.dim)]
        return [tuple(col[k] for col in cols) for k in range(self.dim)]

    def left_mult_matrix(self, x: Sequence[Fraction]) -> list[Vector]:
        cols = [self.bracket(x, unit(self.dim, j)) for j in range(self.dim)]
        return [tuple(col[k] for col in cols) for k in range(self.dim)]

    def describe(self) -> list[str]:
        lines = []
        for (i, j), terms in self.structure.items():
            rhs = " + ".join(f"{c}*{self.basis_names[k]}" if c != 1 else self.basis_names[k] for k, c in terms)
            lines.append(f"[{self.basis_names[i]}, {self.basis_names[j]}] = {rhs}")
        return lines


def check_leibniz_identity(a: LeibnizAlgebra) -> list[tuple[int, int, int, Vector]]:
    """All basis triples where ``[x,[y,z]] - [[x,y],z] + [[x,z],y]`` is nonzero."""
    n = a.dim
    prods = [[a.basis_bracket(i, j) for j in range(n)] for i in range(n)]
    violations = []
    for i in range(n):
        ei = unit(n, i)
        for j in range(n):
            for k in range(n):
                lhs = a.bracket(ei, prods[j][k])
                t2 = a.bracket(prods[i][j], unit(n, k))
                t3 = a.bracket(prods[i][k], unit(n, j))
                res = tuple(p - q + r for p, q, r in zip(lhs, t2, t3))
                if any(res):
                    violations.append((i, j, k, res))
    return violations


def whole(a: LeibnizAlgebra) -> SubspaceBasis:
    return SubspaceBasis(a.dim, tuple(unit(a.dim, i) for i in range(a.dim)))


def product_subspace(a: LeibnizAlgebra, u: SubspaceBasis, w: SubspaceBasis) -> SubspaceBasis:
    """Span of ``[u_i, w_j]`` over the two bases."""
    if u.ambient_dim != a.dim or w.ambient_dim != a.dim:
        raise DimensionError("subspaces must live in the algebra")
    ech = Echelon(a.dim)
    for x in u.vectors:
        for y in w.vectors:
            ech.add(a.bracket(x, y))
    return SubspaceBasis(a.dim, tuple(ech.dense_rows()))


@dataclass(frozen=True)
class SeriesReport:
    kind: str
    dims: tuple[int, ...]
    reaches_zero: bool
    index: Optional[int]

    @property
    def verdict(self) -> str:
        word = "nilpotent" if self.kind == "lower_central" else "solvable"
        if self.reaches_zero:
            return f"{word}, index {self.index}"
        return f"not {word} (stabilizes at dim {self.dims[-1]})"


def series(a: LeibnizAlgebra, kind: str = "lower_central") -> SeriesReport:
    """Lower central (``L^{k+1} = [L^k, L]``) or derived series.

    ``dims`` is strictly decreasing; the index is the 1-based position of the
    zero term, matching ``L^1 = L``.
    """
    if kind not in ("lower_central", "derived"):
        raise ValueError(f"unknown series kind {kind!r}")
    full = whole(a)
    cur = full
    dims = [cur.dim]
    while cur.dim > 0:
        nxt = product_subspace(a, cur, full if kind == "lower_central" else cur)
        if nxt.dim == cur.dim:
            return SeriesReport(kind, tuple(dims), False, None)
        cur = nxt
        dims.append(cur.dim)
    return SeriesReport(kind, tuple(dims), True, len(dims))


def is_nilpotent(a: LeibnizAlgebra) -> bool:
    return series(a, "lower_central").reaches_zero


def is_solvable(a: LeibnizAlgebra) -> bool:
    return series(a, "derived").reaches_zero


def jordan_profile(a: LeibnizAlgebra, x: Sequence[Fraction]) -> tuple[int, ...]:
    """Descending Jordan block sizes of the nilpotent operator ``ad_x``."""
    n = a.dim
    m = a.right_mult_matrix(vec(x))
    ranks = [n]
    power = m
    while True:
        r = rank(power, n)
        ranks.append(r)
        if r == 0:
            break
        if len(ranks) > n + 1:
            raise NotNilpotentError("ad_x is not nilpotent")
        power = mat_mul(power, m)
    # ranks[k] = rank(ad^k); blocks of size >= k number ranks[k-1] - ranks[k]
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes = []
    for k, cnt in enumerate(at_least, start=1):
        nxt = at_least[k] if k < len(at_least) else 0
        sizes += [k] * (cnt - nxt)
    return tuple(sorted(sizes, reverse=True))


def characteristic_sequence(a: LeibnizAlgebra, candidates: Sequence[Sequence]) -> tuple[int, ...]:
    """Lexicographic maximum of Jordan profiles over ``candidates``.

    This is a lower bound for the true characteristic sequence, which is a
    maximum over all of ``N \\ N^2``.
    """
    if not candidates:
        raise ValueError("need at least one candidate")
    if not is_nilpotent(a):
        raise NotNilpotentError("characteristic sequence needs a nilpotent algebra")
    sq = product_subspace(a, whole(a), whole(a)).echelon()
    best = None
    for idx, x in enumerate(candidates):
        x = vec(x)
        if sq.contains(x):
            raise ValueError(f"candidate {idx} lies in N^2")
        prof = jordan_profile(a, x)
        if best is None or prof > best:
            best = prof
    return best


def zero_vector(a: LeibnizAlgebra) -> Vector:
    return zeros(a.dim)
