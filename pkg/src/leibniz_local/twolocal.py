"""2-local derivations.

Two tools:

* Separating elements. If evaluation at q is injective on Der, any 2-local
  derivation agrees everywhere with the unique derivation matching it at q,
  so every 2-local derivation is a derivation.
* The ratio counterexample. If the rank-one derivations ``v -> l(v) w`` form a
  pencil of dimension >= 2, the map ``xi -> f(l1(xi), l2(xi)) w`` with
  ``f(z1, z2) = z1^2/z2`` (0 when z2 = 0) is 2-local but not additive.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import LeibnizAlgebra
from .catalog import nilradical_indices
from .derivations import LinearOperator, OperatorSubspace, derivation_space, is_derivation
from .exactlin import ZERO, DimensionError, Echelon, SubspaceBasis, Vector, nullspace, solve, unit, vec
from .localder import evaluation_subspace, sample_vector


def pair_interpolate(x, fx, y, fy, der: OperatorSubspace) -> Optional[Vector]:
    """Coefficients c with ``D(x) = fx`` and ``D(y) = fy`` for ``D = sum c_i D_i``."""
    x, fx, y, fy = vec(x), vec(fx), vec(y), vec(fy)
    n = der.n
    if not all(len(v) == n for v in (x, fx, y, fy)):
        raise DimensionError(f"all vectors must have length {n}")
    if not der.basis:
        return () if not any(fx) and not any(fy) else None
    ix = [d.apply(x) for d in der.basis]
    iy = [d.apply(y) for d in der.basis]
    system = [tuple(img[k] for img in ix) for k in range(n)] + [tuple(img[k] for img in iy) for k in range(n)]
    return solve(system, fx + fy, der.dim)


@dataclass(frozen=True)
class SeparationCertificate:
    q: Vector
    der_dim: int
    eval_dim: int

    @property
    def separating(self) -> bool:
        return self.eval_dim == self.der_dim

    def to_dict(self) -> dict:
        return {"q": [str(c) for c in self.q], "der_dim": self.der_dim,
                "eval_dim": self.eval_dim, "separating": self.separating}


def is_separating(der: OperatorSubspace, q: Sequence) -> SeparationCertificate:
    q = vec(q)
    return SeparationCertificate(q, der.dim, evaluation_subspace(der, q).dim)


def image_bound(der: OperatorSubspace) -> int:
    """Dimension of the sum of the images of all derivations.

    Every evaluation subspace lies inside it, so if it is smaller than dim Der
    no separating element can exist.
    """
    ech = Echelon(der.n)
    for d in der.basis:
        for col in d.columns:
            ech.add(col)
    return ech.rank


@dataclass
class SeparationSearch:
    found: Optional[SeparationCertificate]
    tried: int
    impossible: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {"found": None if self.found is None else self.found.to_dict(),
                "tried": self.tried, "impossible": self.impossible, "note": self.note}


def candidate_pool(a: LeibnizAlgebra, samples: int, seed: int):
    n = a.dim
    for i in range(n):
        yield unit(n, i), "basis"
    nil = nilradical_indices(a)
    if nil is not None:
        yield tuple(Fraction(1) if i in nil else ZERO for i in range(n)), "nilradical_sum"
    yield (Fraction(1),) * n, "all_ones"
    for k in range(samples):
        yield sample_vector(n, seed, k), "sample"


def find_separating_element(
    a: LeibnizAlgebra,
    samples: int = 1000,
    seed: int = 0,
    der: Optional[OperatorSubspace] = None,
) -> SeparationSearch:
    """First separating element in the pool, or None.

    A None result after exhausting the pool is not a proof of nonexistence,
    unless the image bound already rules separation out (``impossible``).
    """
    der = der if der is not None else derivation_space(a)
    bound = image_bound(der)
    if bound < der.dim:
        return SeparationSearch(None, 0, True,
                                f"every evaluation subspace lies in a {bound}-dim space < dim Der = {der.dim}")
    tried = 0
    for q, tag in candidate_pool(a, samples, seed):
        if not any(q):
            continue
        tried += 1
        cert = is_separating(der, q)
        if cert.separating:
            return SeparationSearch(cert, tried, False, f"found in pool group '{tag}'")
    return SeparationSearch(None, tried, False, "candidate pool exhausted")


class TwoLocalStatus(str, enum.Enum):
    CERTIFIED = "Certified"
    NOT_CERTIFIED = "NotCertified"
    ALL_PAIRS_WITNESSED = "AllPairsWitnessed"
    FAILED_PAIR = "FailedPair"


@dataclass
class TwoLocalVerdict:
    status: TwoLocalStatus
    der_dim: int
    search: SeparationSearch

    def to_dict(self) -> dict:
        return {"status": self.status.value, "der_dim": self.der_dim, "search": self.search.to_dict()}


def certify_twolocal_equals_der(a: LeibnizAlgebra, samples: int = 1000, seed: int = 0,
                                der: Optional[OperatorSubspace] = None) -> TwoLocalVerdict:
    der = der if der is not None else derivation_space(a)
    search = find_separating_element(a, samples, seed, der)
    status = TwoLocalStatus.CERTIFIED if search.found else TwoLocalStatus.NOT_CERTIFIED
    return TwoLocalVerdict(status, der.dim, search)


def rank_one_derivation_pencil(der: OperatorSubspace, w: Sequence) -> list[Vector]:
    """Basis of functionals l such that ``v -> l(v) w`` is a derivation."""
    w = vec(w)
    if not any(w):
        raise ValueError("w must be nonzero")
    n, d = der.n, der.dim
    # unknowns: c_1..c_d, l_1..l_n ;  sum_i c_i D_i[k][j] - w_k l_j = 0
    rows = []
    for k in range(n):
        for j in range(n):
            row = [op.matrix[k][j] for op in der.basis] + [ZERO] * n
            row[d + j] = -w[k]
            rows.append(tuple(row))
    sol = nullspace(rows, d + n)
    return list(SubspaceBasis.span(n, (v[d:] for v in sol.vectors)).vectors)


def rank_one(w: Vector, l: Vector) -> LinearOperator:
    return LinearOperator(len(w), tuple(tuple(wk * lj for lj in l) for wk in w))


def ratio_rule(z1: Fraction, z2: Fraction) -> Fraction:
    return z1 * z1 / z2 if z2 else ZERO


def _dot(l: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(l, v) if a and b), ZERO)


@dataclass(frozen=True)
class NablaSpec:
    l1: Vector
    l2: Vector
    w: Vector
    rule: str = "z1^2/z2"

    def __post_init__(self):
        if self.rule != "z1^2/z2":
            raise ValueError(f"unsupported rule {self.rule!r}")
        if SubspaceBasis.span(len(self.l1), [self.l1, self.l2]).dim != 2:
            raise ValueError("l1 and l2 must be linearly independent")

    @property
    def dim(self) -> int:
        return len(self.w)

    @cached_property
    def _operators(self) -> tuple[LinearOperator, LinearOperator]:
        return rank_one(self.w, self.l1), rank_one(self.w, self.l2)

    def operators(self) -> tuple[LinearOperator, LinearOperator]:
        return self._operators

    def validate(self, a: LeibnizAlgebra) -> None:
        for op in self.operators():
            if is_derivation(a, op):
                raise ValueError("rank-one map built from the NablaSpec is not a derivation")

    def to_dict(self) -> dict:
        return {"l1": [str(c) for c in self.l1], "l2": [str(c) for c in self.l2],
                "w": [str(c) for c in self.w], "rule": self.rule}

    @classmethod
    def from_dict(cls, data: dict) -> "NablaSpec":
        return cls(vec(data["l1"]), vec(data["l2"]), vec(data["w"]), data.get("rule", "z1^2/z2"))


def evaluate_nabla(spec: NablaSpec, xi: Sequence) -> Vector:
    xi = vec(xi)
    c = ratio_rule(_dot(spec.l1, xi), _dot(spec.l2, xi))
    return tuple(c * wk for wk in spec.w)


def build_nabla(a: LeibnizAlgebra, w: Optional[Sequence] = None,
                der: Optional[OperatorSubspace] = None) -> Optional[NablaSpec]:
    """Ratio counterexample from a pencil of dimension >= 2, or None.

    With ``w=None`` the basis vectors are tried in order.
    """
    der = der if der is not None else derivation_space(a)
    ws = [vec(w)] if w is not None else [unit(a.dim, i) for i in range(a.dim)]
    for cand in ws:
        pencil = rank_one_derivation_pencil(der, cand)
        if len(pencil) >= 2:
            spec = NablaSpec(pencil[0], pencil[1], cand)
            spec.validate(a)
            return spec
    return None


def dual_vectors(spec: NablaSpec) -> tuple[Vector, Vector]:
    """Vectors p1, p2 with ``l_i(p_j) = delta_ij``."""
    m = [spec.l1, spec.l2]
    p1 = solve(m, (Fraction(1), ZERO), spec.dim)
    p2 = solve(m, (ZERO, Fraction(1)), spec.dim)
    return p1, p2


@dataclass
class PairVerdict:
    status: TwoLocalStatus
    pairs: int
    seed: int
    proportional_pairs: int = 0
    unique_pairs: int = 0
    failed: Optional[tuple[Vector, Vector]] = None
    samples: list = field(default_factory=list)

    def to_dict(self, max_samples: int = 10) -> dict:
        return {
            "status": self.status.value,
            "kind": "refutation" if self.failed else "evidence",
            "pairs": self.pairs,
            "seed": self.seed,
            "proportional_pairs": self.proportional_pairs,
            "unique_pairs": self.unique_pairs,
            "failed": None if self.failed is None else [[str(c) for c in v] for v in self.failed],
            "samples": [
                {"xi": [str(c) for c in x], "eta": [str(c) for c in y], "a": str(p), "b": str(q)}
                for x, y, p, q in self.samples[:max_samples]
            ],
        }


def _pair(n: int, seed: int, idx: int) -> tuple[Vector, Vector]:
    xi = sample_vector(n, seed, 2 * idx)
    if idx % 4 == 3:
        # force the proportional case of the 2x2 system
        lam = Fraction(int(np.random.default_rng([seed, idx, 7]).integers(-3, 4)))
        return xi, tuple(lam * c for c in xi)
    return xi, sample_vector(n, seed, 2 * idx + 1)


def verify_pair(spec: NablaSpec, xi: Vector, eta: Vector):
    """Solve for (a, b) with ``a*l1 + b*l2`` reproducing nabla at xi and eta.

    Returns ``(solution, proportional)``; solution is None on failure.
    """
    z = (_dot(spec.l1, xi), _dot(spec.l2, xi))
    u = (_dot(spec.l1, eta), _dot(spec.l2, eta))
    rhs = (ratio_rule(*z), ratio_rule(*u))
    proportional = z[0] * u[1] - z[1] * u[0] == 0
    sol = solve([z, u], rhs, 2)
    if sol is not None:
        w1, w2 = spec.operators()
        for v in (xi, eta):
            image = tuple(sol[0] * p + sol[1] * q for p, q in zip(w1.apply(v), w2.apply(v)))
            if image != evaluate_nabla(spec, v):
                return None, proportional
    return sol, proportional


def verify_twolocal_property(spec: NablaSpec, pair_pool: int, seed: int) -> PairVerdict:
    proportional = unique = 0
    samples = []
    for idx in range(pair_pool):
        xi, eta = _pair(spec.dim, seed, idx)
        sol, prop = verify_pair(spec, xi, eta)
        if sol is None:
            return PairVerdict(TwoLocalStatus.FAILED_PAIR, pair_pool, seed, proportional, unique, (xi, eta), samples)
        if prop:
            proportional += 1
        else:
            unique += 1
        samples.append((xi, eta, sol[0], sol[1]))
    return PairVerdict(TwoLocalStatus.ALL_PAIRS_WITNESSED, pair_pool, seed, proportional, unique, None, samples)


def refute_additivity(spec: NablaSpec, radius: int = 3) -> tuple[Vector, Vector]:
    """Vectors u, v with ``nabla(u+v) != nabla(u) + nabla(v)``.

    Searches (l1, l2)-coordinates of u and v over ``[-radius, radius]^2``.
    """
    p1, p2 = dual_vectors(spec)
    grid = range(-radius, radius + 1)
    for a1, a2, b1, b2 in itertools.product(grid, repeat=4):
        u = tuple(a1 * x + a2 * y for x, y in zip(p1, p2))
        v = tuple(b1 * x + b2 * y for x, y in zip(p1, p2))
        s = tuple(x + y for x, y in zip(u, v))
        lhs = evaluate_nabla(spec, s)
        rhs = tuple(x + y for x, y in zip(evaluate_nabla(spec, u), evaluate_nabla(spec, v)))
        if lhs != rhs:
            return u, v
    raise RuntimeError("no additivity witness in the search grid")
