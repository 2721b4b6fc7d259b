from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from leibniz_local.exactlin import (
    DimensionError,
    SubspaceBasis,
    identity,
    mat_vec,
    nullspace,
    parse_scalar,
    rank,
    rref,
    solve,
    subspace_contains,
    subspace_equal,
    vec,
)

F = Fraction


def M(rows):
    return [vec(r) for r in rows]


def test_rref_proportional_rows():
    r, piv, rk = rref(M([[1, 2], [2, 4]]))
    assert rk == 1 and piv == [0]
    assert r == [vec([1, 2]), vec([0, 0])]


def test_rref_identity_is_fixed():
    r, piv, rk = rref(identity(3))
    assert r == identity(3) and rk == 3 and piv == [0, 1, 2]


def test_rref_permutation():
    r, _, rk = rref(M([[0, 1], [1, 0]]))
    assert r == identity(2) and rk == 2


def test_nullspace_examples():
    ns = nullspace(M([[1, 1]]))
    assert ns.dim == 1
    v = ns.vectors[0]
    assert v[0] == -v[1] != 0
    assert nullspace(identity(4)).dim == 0
    assert nullspace(M([[0, 0, 0], [0, 0, 0]])).dim == 3


def test_solve_examples():
    assert solve(M([[1, 0], [0, 1]]), vec([3, 4])) == vec([3, 4])
    assert solve(M([[1, 1], [2, 2]]), vec([1, 3])) is None
    assert solve(M([[1, 1], [2, 2]]), vec([1, 2])) == vec([1, 0])


def test_solve_rejects_bad_rhs():
    with pytest.raises(DimensionError):
        solve(M([[1, 0]]), vec([1, 2]))


def test_subspace_examples():
    e1 = SubspaceBasis(2, (vec([1, 0]),))
    plane = SubspaceBasis(2, (vec([1, 0]), vec([0, 1])))
    diag = SubspaceBasis(2, (vec([1, 1]),))
    assert subspace_contains(plane, e1)
    assert not subspace_contains(e1, diag)
    swapped = SubspaceBasis(2, (vec([0, 1]), vec([1, 0])))
    assert subspace_equal(plane, swapped)
    with pytest.raises(DimensionError):
        subspace_contains(plane, SubspaceBasis(3, (vec([1, 0, 0]),)))


@pytest.mark.parametrize("text,value", [("3", F(3)), ("-1/2", F(-1, 2)), ("0", F(0))])
def test_parse_scalar_canonical(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("text", ["2/4", "3/1", "1/-2", "-0", "1.5", "", "a", "1/0"])
def test_parse_scalar_rejects(text):
    with pytest.raises(ValueError):
        parse_scalar(text)


def test_parse_scalar_normalize():
    assert parse_scalar("2/4", normalize=True) == F(1, 2)


small = st.integers(-4, 4).map(Fraction) | st.fractions(min_value=-3, max_value=3, max_denominator=5)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [tuple(draw(st.lists(small, min_size=c, max_size=c))) for _ in range(r)]


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_rank_nullity_and_sympy_rank(m):
    cols = len(m[0])
    ns = nullspace(m)
    assert rank(m) + ns.dim == cols
    assert rank(m) == sympy.Matrix(m).rank()
    for v in ns.vectors:
        assert not any(mat_vec(m, v))


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_rref_idempotent(m):
    r, _, _ = rref(m)
    assert rref(r)[0] == r


@given(matrices(), st.data())
@settings(max_examples=100, deadline=None)
def test_solve_returns_exact_solution(m, data):
    b = tuple(data.draw(st.lists(small, min_size=len(m), max_size=len(m))))
    x = solve(m, b)
    if x is not None:
        assert mat_vec(m, x) == b
    else:
        aug = [row + (bi,) for row, bi in zip(m, b)]
        assert rank(aug) > rank(m)


@given(matrices(max_rows=4, max_cols=5), st.data())
@settings(max_examples=60, deadline=None)
def test_subspace_equal_under_change_of_basis(m, data):
    s = SubspaceBasis.span(len(m[0]), m)
    if s.dim == 0:
        return
    k = s.dim
    while True:
        g = [data.draw(st.lists(st.integers(-3, 3), min_size=k, max_size=k)) for _ in range(k)]
        if sympy.Matrix(g).det() != 0:
            break
    mixed = [tuple(sum(Fraction(g[i][j]) * s.vectors[j][c] for j in range(k)) for c in range(s.ambient_dim))
             for i in range(k)]
    other = SubspaceBasis(s.ambient_dim, tuple(mixed))
    assert subspace_equal(s, other) and subspace_equal(other, s) and subspace_equal(s, s)
