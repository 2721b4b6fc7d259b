"""Local derivations.

A linear map is a local derivation when at every point it agrees with some
derivation. The set of such maps is a linear space, and for any finite set of
test vectors V the space

    CS(V) = {T : T(v) in {D(v) : D in Der} for all v in V}

contains it. Showing CS(V) = Der for one finite V therefore proves that every
local derivation is a derivation.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import LeibnizAlgebra
from .derivations import LinearOperator, OperatorSubspace, derivation_space, is_derivation
from .exactlin import (
    ZERO,
    DimensionError,
    Echelon,
    SubspaceBasis,
    Vector,
    annihilator,
    solve,
    unit,
    vec,
)

SAMPLE_RANGE = 5


def sample_vector(n: int, seed: int, index: int, lo: int = -SAMPLE_RANGE, hi: int = SAMPLE_RANGE) -> Vector:
    """Small-integer vector; the stream depends only on (seed, index)."""
    rng = np.random.default_rng([seed, index])
    return tuple(Fraction(int(v)) for v in rng.integers(lo, hi + 1, size=n))


@dataclass(frozen=True)
class ConstraintSchedule:
    vectors: tuple[Vector, ...]
    provenance: tuple[str, ...]

    def __post_init__(self):
        if len(self.vectors) != len(self.provenance):
            raise ValueError("one provenance tag per vector")
        if any(not any(v) for v in self.vectors):
            raise ValueError("schedule vectors must be nonzero")

    @classmethod
    def basis(cls, n: int) -> "ConstraintSchedule":
        return cls(tuple(unit(n, i) for i in range(n)), ("basis",) * n)

    def extend(self, vectors: Sequence[Sequence], tag: str) -> "ConstraintSchedule":
        vs = tuple(vec(v) for v in vectors)
        return ConstraintSchedule(self.vectors + vs, self.provenance + (tag,) * len(vs))

    def __len__(self):
        return len(self.vectors)


def evaluation_subspace(der: OperatorSubspace, x: Sequence[Fraction]) -> SubspaceBasis:
    """Span of ``D(x)`` over the derivation basis."""
    x = vec(x)
    if len(x) != der.n:
        raise DimensionError(f"vector length {len(x)} != {der.n}")
    return SubspaceBasis.span(der.n, (d.apply(x) for d in der.basis))


def pointwise_membership(delta: LinearOperator, x: Sequence[Fraction], der: OperatorSubspace) -> Optional[Vector]:
    """Coefficients c with ``(sum c_i D_i)(x) = delta(x)``, or None."""
    x = vec(x)
    if delta.dim != der.n or len(x) != der.n:
        raise DimensionError("operator, vector and derivation space dims differ")
    target = delta.apply(x)
    if not der.basis:
        return () if not any(target) else None
    images = [d.apply(x) for d in der.basis]
    system = [tuple(img[k] for img in images) for k in range(der.n)]
    return solve(system, target, len(images))


def _constraint_rows(der: OperatorSubspace, v: Vector) -> list[dict[int, Fraction]]:
    """Rows of ``a . T(v) = 0`` for each functional a annihilating E(v)."""
    n = der.n
    if len(v) != n:
        raise DimensionError(f"schedule vector length {len(v)} != {n}")
    rows = []
    for a in annihilator(evaluation_subspace(der, v)):
        # a . T(v) = sum_{k,l} a_k v_l T[k][l]
        row = {k * n + l: a[k] * v[l] for k in range(n) if a[k] for l in range(n) if v[l]}
        if row:
            rows.append(row)
    return rows


def _space_from_rows(n: int, ech: Echelon) -> OperatorSubspace:
    return OperatorSubspace.span(n, (LinearOperator.from_flat(n, b) for b in ech.null_basis()))


def constraint_space(der: OperatorSubspace, schedule: ConstraintSchedule) -> OperatorSubspace:
    ech = Echelon(der.n * der.n)
    for v in schedule.vectors:
        for row in _constraint_rows(der, v):
            ech.add(row)
    return _space_from_rows(der.n, ech)


def gap_basis(cs: OperatorSubspace, der: OperatorSubspace) -> list[LinearOperator]:
    """Elements of ``cs`` completing a basis of ``der`` to one of ``cs``."""
    ech = der.echelon()
    out = []
    for op in cs.basis:
        if ech.add(op.flat):
            out.append(op)
    return out


class Status(str, enum.Enum):
    CERTIFIED = "Certified"
    CANDIDATE_GAP = "CandidateGap"
    REFUTED = "Refuted"


@dataclass
class LocDerVerdict:
    status: Status
    cs_dim: int
    der_dim: int
    schedule: ConstraintSchedule
    gap_basis: list[LinearOperator] = field(default_factory=list)
    witness: Optional[Vector] = None
    rounds: int = 0
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "cs_dim": self.cs_dim,
            "der_dim": self.der_dim,
            "rounds": self.rounds,
            "note": self.note,
            "schedule": [
                {"vector": [str(c) for c in v], "provenance": p}
                for v, p in zip(self.schedule.vectors, self.schedule.provenance)
            ],
            "gap_basis": [op.to_dict() for op in self.gap_basis],
            "witness": None if self.witness is None else [str(c) for c in self.witness],
        }


def proof_schedule_vectors(a: LeibnizAlgebra) -> list[tuple[Vector, str]]:
    """Test vectors used in the standard proof for ``R(N_{m1..ms}, s)``.

    e^1_1 + e^t_1 (t >= 2), e^1_1 + e^1_i (i >= 2), e^t_i + e^t_1 + e^1_1
    (t >= 2, i >= 2) and x_1 + e^1_2.
    """
    fam = a.family or {}
    if fam.get("family") != "RModel":
        return []
    m = fam["m"]
    n = a.dim

    def e(t, i):
        return a.index(f"e^{t}_{i}")

    def vsum(*idx):
        v = [ZERO] * n
        for k in idx:
            v[k] += 1
        return tuple(v)

    out = []
    for t in range(2, len(m) + 1):
        out.append((vsum(e(1, 1), e(t, 1)), "proof_pair"))
    for i in range(2, m[0] + 1):
        out.append((vsum(e(1, 1), e(1, i)), "proof_pair"))
    for t in range(2, len(m) + 1):
        for i in range(2, m[t - 1] + 1):
            out.append((vsum(e(t, i), e(t, 1), e(1, 1)), "proof_triple"))
    out.append((vsum(a.index("x1"), e(1, 2)), "proof_pair"))
    return out


GREEDY_COEFFS = (-2, -1, 1, 2)
GREEDY_BATCH = 64


def _greedy_candidates(n: int, seed: int, round_no: int, count: int) -> list[Vector]:
    """Random sums of two or three basis vectors with coefficients in +-1, +-2.

    Small coefficients matter: the binding constraints come from points where
    the evaluation subspace drops rank, and those are rare among generic
    vectors.
    """
    rng = np.random.default_rng([seed, 1_000_000 + round_no])
    out = []
    for _ in range(count):
        size = int(rng.integers(2, 4)) if n >= 3 else n
        support = rng.choice(n, size=size, replace=False)
        v = [ZERO] * n
        for k in support:
            v[int(k)] = Fraction(int(rng.choice(GREEDY_COEFFS)))
        out.append(tuple(v))
    return out


def certify_locder_equals_der(
    a: LeibnizAlgebra,
    strategy: str = "paper",
    max_rounds: int = 5,
    seed: int = 0,
    der: Optional[OperatorSubspace] = None,
) -> LocDerVerdict:
    """Try to prove LocDer(a) = Der(a) with a finite constraint schedule.

    Both strategies start from the basis vectors. ``paper`` appends the fixed
    proof test vectors (``R(N, s)`` only). ``greedy`` runs
    rounds over a batch of random pair/triple sums and keeps each candidate
    that shrinks the constraint space; it stops when the space equals Der, when
    a whole round keeps nothing, or after ``max_rounds``.
    """
    if strategy not in ("paper", "greedy"):
        raise ValueError(f"unknown strategy {strategy!r}")
    der = der if der is not None else derivation_space(a)
    n = a.dim
    target = n * n - der.dim
    schedule = ConstraintSchedule.basis(n)
    if strategy == "paper":
        for v, tag in proof_schedule_vectors(a):
            schedule = schedule.extend([v], tag)
    ech = Echelon(n * n)
    for v in schedule.vectors:
        for row in _constraint_rows(der, v):
            ech.add(row)
    rounds = 0
    note = ""
    if strategy == "greedy":
        while ech.rank < target:
            if rounds >= max_rounds:
                note = f"max_rounds={max_rounds} exhausted"
                break
            rounds += 1
            kept = []
            for v in _greedy_candidates(n, seed, rounds, GREEDY_BATCH * n):
                added = False
                for row in _constraint_rows(der, v):
                    added |= ech.add(row)
                if added:
                    kept.append(v)
                if ech.rank == target:
                    break
            schedule = schedule.extend(kept, "greedy_sum")
            if not kept:
                note = f"constraint space stabilized at dim {n * n - ech.rank} in round {rounds}"
                break
    cs = _space_from_rows(n, ech)
    if not cs.contains_space(der):
        raise AssertionError("derivation space escaped the constraint space")
    if cs.dim == der.dim:
        return LocDerVerdict(Status.CERTIFIED, cs.dim, der.dim, schedule, rounds=rounds, note=note)
    return LocDerVerdict(Status.CANDIDATE_GAP, cs.dim, der.dim, schedule, gap_basis(cs, der), rounds=rounds, note=note)


def build_counterexample_local(family: str, n: int) -> LinearOperator:
    """The map ``sum xi_i f_i + xi_{n+1} x  ->  2 xi_1 f_{n-1} + xi_2 f_n`` on R1 / R2."""
    if family.upper() not in ("R1", "R2"):
        raise ValueError(f"counterexample defined for R1 and R2 only, not {family!r}")
    if n < 3:
        raise ValueError("need n >= 3 so that f_{n-1} differs from f_1 and f_n")
    dim = n + 1
    images = {0: tuple(Fraction(2) if k == n - 2 else ZERO for k in range(dim)),
              1: unit(dim, n - 1)}
    return LinearOperator.from_images(dim, images)


def shift_derivation(n: int, power: int) -> LinearOperator:
    """``f_i -> f_{i+power}``, ``x -> 0``; a derivation of R1 and R2."""
    dim = n + 1
    return LinearOperator.from_images(dim, {i: unit(dim, i + power) for i in range(n - power)})


def closed_form_witness(n: int, xi: Sequence[Fraction]) -> LinearOperator:
    """Derivation agreeing with the counterexample map at ``xi``.

    With D1 = shift by n-2 and D2 = shift by n-1: for xi_1 != 0 use
    2*D1 + t*D2 with t = -xi_2/xi_1; for xi_1 = 0 the map sends xi to
    xi_2 f_n, which D1 reproduces.
    """
    d1 = shift_derivation(n, n - 2)
    d2 = shift_derivation(n, n - 1)
    xi = vec(xi)
    if xi[0]:
        t = -xi[1] / xi[0]
        return d1.scale(2) + d2.scale(t)
    return d1


class SampleStatus(str, enum.Enum):
    ALL_WITNESSED = "AllWitnessed"
    REFUTED_AT = "RefutedAt"


@dataclass
class SampleVerdict:
    status: SampleStatus
    trials: int
    seed: int
    refuting_vector: Optional[Vector] = None
    witnesses: list[tuple[Vector, Vector]] = field(default_factory=list)

    @property
    def kind(self) -> str:
        # a refutation is a proof; full coverage of samples is only evidence
        return "proof" if self.status is SampleStatus.REFUTED_AT else "evidence"

    def to_dict(self, max_witnesses: int = 10) -> dict:
        return {
            "status": self.status.value,
            "kind": self.kind,
            "trials": self.trials,
            "seed": self.seed,
            "refuting_vector": None if self.refuting_vector is None else [str(c) for c in self.refuting_vector],
            "witnesses": [
                {"x": [str(c) for c in x], "coefficients": [str(c) for c in w]}
                for x, w in self.witnesses[:max_witnesses]
            ],
        }


def _check_one(args):
    delta, der, seed, idx = args
    x = sample_vector(der.n, seed, idx)
    return x, pointwise_membership(delta, x, der)


def sampled_local_check(
    delta: LinearOperator,
    der: OperatorSubspace,
    trials: int,
    seed: int,
    jobs: int = 1,
    extra_points: Sequence[Sequence] = (),
) -> SampleVerdict:
    """Look for a point where ``delta`` leaves the evaluation subspace.

    ``extra_points`` are checked first (basis vectors are always included).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = der.n
    fixed = [unit(n, i) for i in range(n)] + [vec(p) for p in extra_points]
    for x in fixed:
        if pointwise_membership(delta, x, der) is None:
            return SampleVerdict(SampleStatus.REFUTED_AT, trials, seed, x)
    tasks = [(delta, der, seed, i) for i in range(trials)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_check_one, tasks, chunksize=max(1, trials // (4 * jobs))))
    else:
        results = map(_check_one, tasks)
    witnesses = []
    for x, w in results:
        if w is None:
            return SampleVerdict(SampleStatus.REFUTED_AT, trials, seed, x, witnesses)
        witnesses.append((x, w))
    return SampleVerdict(SampleStatus.ALL_WITNESSED, trials, seed, None, witnesses)


def gap_elements_fail_rule(a: LeibnizAlgebra, verdict: LocDerVerdict) -> bool:
    return all(is_derivation(a, g) for g in verdict.gap_basis)
