import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
import closed_forms
from leibniz_local.algebra import LeibnizAlgebra
from leibniz_local.catalog import build_Lt, build_model_nilradical, build_R1, build_R2, build_R_model
from leibniz_local.derivations import (
    LinearOperator,
    OperatorSubspace,
    derivation_space,
    inner_derivation,
    inner_derivation_space,
    is_derivation,
    lie_closure_check,
    operator_from_json,
    operator_to_json,
)
from leibniz_local.exactlin import unit
from leibniz_local.localder import build_counterexample_local

F = Fraction


def images(a, op):
    return {a.basis_names[j]: {a.basis_names[k]: c for k, c in enumerate(col) if c}
            for j, col in enumerate(op.columns) if any(col)}


def test_Lt_derivations():
    a = build_Lt(2, (-1, 0))
    der = derivation_space(a)
    assert der.dim == 3 == oracles.derivation_dim(*oracles.table_Lt([-1, 0]))
    assert der.equals(closed_forms.der_Lt(a))
    for op in der.basis:
        im = images(a, op)
        assert set(im.get("f1", {})) <= {"f1"} and set(im.get("f2", {})) <= {"f2"}
        assert set(im.get("x1", {})) <= {"f1"} and "x2" not in im


def test_R1_derivations_are_toeplitz():
    a = build_R1(3)
    der = derivation_space(a)
    assert der.dim == 3 == oracles.derivation_dim(*oracles.table_R(3, False))
    assert der.equals(closed_forms.der_R(a))
    for op in der.basis:
        m = op.matrix
        # upper-triangular Toeplitz on the f block: constant along diagonals
        for k in range(3):
            for j in range(3):
                if k < j:
                    assert m[k][j] == 0
                elif k > 0 and j > 0:
                    assert m[k][j] == m[k - 1][j - 1]
        assert not any(op.columns[3])


def test_R_model_derivations():
    a = build_R_model((3, 2))
    der = derivation_space(a)
    assert der.dim == 3 == oracles.derivation_dim(*oracles.table_model((3, 2), True))
    assert der.equals(closed_forms.der_R_model(a))


def test_is_derivation_counterexample_residual():
    a = build_R1(3)
    delta = LinearOperator.from_images(4, {0: (F(0), F(2), F(0), F(0)), 1: unit(4, 2)})
    assert delta == build_counterexample_local("R1", 3)
    res = {(i, j): r for i, j, r in is_derivation(a, delta)}
    assert res[(0, 3)] == (0, 0, -1, 0)


def test_is_derivation_trivial_cases():
    a = build_R2(3)
    assert is_derivation(a, LinearOperator.zero(4)) == []
    for op in derivation_space(a).basis:
        assert is_derivation(a, op) == []


def test_inner_derivations():
    r = build_R_model((3, 2))
    assert inner_derivation_space(r).equals(derivation_space(r))
    assert inner_derivation_space(LeibnizAlgebra.abelian(3)).dim == 0
    r1 = build_R1(3)
    inner = inner_derivation_space(r1)
    # only ad_x is nonzero: nothing multiplies by f_i on the right
    assert inner.dim == 1
    assert derivation_space(r1).contains_space(inner)


def test_lie_closure():
    for a in (build_R1(3), build_R2(3), build_R_model((3, 2)), build_Lt(2, (-1, 0))):
        assert lie_closure_check(derivation_space(a))
    nil = LinearOperator.from_images(3, {0: unit(3, 1)})
    assert lie_closure_check(OperatorSubspace.span(3, [nil]))
    e12 = LinearOperator.from_images(2, {1: unit(2, 0)})
    e21 = LinearOperator.from_images(2, {0: unit(2, 1)})
    assert not lie_closure_check(OperatorSubspace.span(2, [e12, e21]))


def test_derivation_space_basis_is_canonical():
    a = build_R2(3)
    d1 = derivation_space(a)
    d2 = derivation_space(a)
    assert d1.basis == d2.basis
    again = OperatorSubspace.span(a.dim, reversed(d1.basis))
    assert again.basis == d1.basis


def _permute(a, perm):
    """Relabel basis: new index of old i is perm[i]."""
    n = a.dim
    names = [None] * n
    for i, p in enumerate(perm):
        names[p] = a.basis_names[i]
    s = {(perm[i], perm[j]): tuple((perm[k], c) for k, c in t) for (i, j), t in a.structure.items()}
    return LeibnizAlgebra(n, tuple(names), s)


@pytest.mark.parametrize("a", [build_R1(3), build_R_model((3, 2)), build_Lt(2, (-1, 0))],
                         ids=lambda a: a.family["family"])
def test_derivation_space_invariant_under_reordering(a):
    n = a.dim
    perm = list(reversed(range(n)))
    b = _permute(a, perm)
    der_b = derivation_space(b)
    moved = []
    for op in derivation_space(a).basis:
        cols = [None] * n
        for j, col in enumerate(op.columns):
            cols[perm[j]] = tuple(col[perm.index(k)] for k in range(n))
        moved.append(LinearOperator.from_columns(cols))
    assert der_b.equals(OperatorSubspace.span(n, moved))


coords = st.integers(-5, 5).map(Fraction)


@pytest.mark.parametrize("a", [build_R1(4), build_R2(3), build_R_model((3, 2)), build_Lt(3, (-1, 0, -1)),
                               build_model_nilradical((2, 2))], ids=lambda a: a.family["family"])
@given(data=st.data())
@settings(max_examples=30, deadline=None)
def test_right_multiplications_are_derivations(a, data):
    x = data.draw(st.lists(coords, min_size=a.dim, max_size=a.dim))
    assert is_derivation(a, inner_derivation(a, x)) == []


def test_operator_json_round_trip():
    op = derivation_space(build_R2(3)).basis[-1].scale(Fraction(-3, 7))
    text = operator_to_json(op)
    data = json.loads(text)
    assert set(data) == {"dim", "columns"} and len(data["columns"]) == 4
    assert operator_from_json(text) == op
