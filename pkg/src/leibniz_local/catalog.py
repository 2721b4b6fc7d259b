"""Builders for the solvable families and the JSON algebra format.

Basis orders are fixed:

* ``L_t``:  f1..fn, x1..xn
* ``R1``/``R2``: f1..fn, x
* model nilradical: e^1_1..e^1_{m1}, e^2_1, ..., e^s_{ms}
* ``R(N, s)``: the nilradical basis followed by x1..xs
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Sequence

from .algebra import LeibnizAlgebra
from .exactlin import format_scalar, parse_scalar


class ParameterError(ValueError):
    pass


class SchemaError(ValueError):
    pass


def build_Lt(n: int, alphas: Sequence[int]) -> LeibnizAlgebra:
    """Direct sum of n two-dimensional algebras ``[f_j,x_j]=f_j, [x_j,f_j]=alpha_j f_j``."""
    alphas = [int(a) for a in alphas]
    if n < 1 or len(alphas) != n:
        raise ParameterError(f"need n >= 1 and exactly n alphas, got n={n}, alphas={alphas}")
    if any(a not in (-1, 0) for a in alphas):
        raise ParameterError(f"alphas must be -1 or 0, got {alphas}")
    names = [f"f{j + 1}" for j in range(n)] + [f"x{j + 1}" for j in range(n)]
    br = {}
    for j, a in enumerate(alphas):
        br[(j, n + j)] = {j: 1}
        if a:
            br[(n + j, j)] = {j: a}
    tag = {"family": "Lt", "n": n, "alphas": alphas}
    return LeibnizAlgebra.from_brackets(names, br, tag)


def _abelian_by_one(n: int, with_left: bool, label: str) -> LeibnizAlgebra:
    if n < 2:
        raise ParameterError(f"{label} needs n >= 2, got {n}")
    names = [f"f{i + 1}" for i in range(n)] + ["x"]
    br = {}
    for i in range(n):
        right = {i: 1}
        if i + 1 < n:
            right[i + 1] = 1
        br[(i, n)] = right
        if with_left:
            br[(n, i)] = {k: -c for k, c in right.items()}
    return LeibnizAlgebra.from_brackets(names, br, {"family": label, "n": n})


def build_R1(n: int) -> LeibnizAlgebra:
    return _abelian_by_one(n, False, "R1")


def build_R2(n: int) -> LeibnizAlgebra:
    return _abelian_by_one(n, True, "R2")


def _check_m(m_list: Sequence[int]) -> list[int]:
    m = [int(v) for v in m_list]
    if not m or any(v < 1 for v in m) or m[0] < 2:
        raise ParameterError(f"m-list needs m1 >= 2 and all m_t >= 1, got {m}")
    return m


def _model_names(m: list[int]) -> list[str]:
    return [f"e^{t + 1}_{i + 1}" for t, mt in enumerate(m) for i in range(mt)]


def _chain_offsets(m: list[int]) -> list[int]:
    offs, acc = [], 0
    for mt in m:
        offs.append(acc)
        acc += mt
    return offs


def _model_brackets(m: list[int]) -> dict:
    offs = _chain_offsets(m)
    br = {}
    for t, mt in enumerate(m):
        for i in range(mt - 1):
            br[(offs[t] + i, 0)] = {offs[t] + i + 1: 1}
    return br


def build_model_nilradical(m_list: Sequence[int]) -> LeibnizAlgebra:
    """``N_{m1..ms}``: ``[e^t_i, e^1_1] = e^t_{i+1}``."""
    m = _check_m(m_list)
    return LeibnizAlgebra.from_brackets(_model_names(m), _model_brackets(m), {"family": "ModelN", "m": m})


def build_R_model(m_list: Sequence[int]) -> LeibnizAlgebra:
    """Solvable extension of the model nilradical by s = len(m) outer elements."""
    m = _check_m(m_list)
    s = len(m)
    offs = _chain_offsets(m)
    nil = sum(m)
    names = _model_names(m) + [f"x{t + 1}" for t in range(s)]
    br = _model_brackets(m)
    x = [nil + t for t in range(s)]
    for i in range(m[0]):
        br[(i, x[0])] = {i: i + 1}
    for t in range(1, s):
        for i in range(m[t]):
            k = offs[t] + i
            if i >= 1:
                br[(k, x[0])] = {k: i}
            br[(k, x[t])] = {k: 1}
    br[(x[0], 0)] = {0: -1}
    return LeibnizAlgebra.from_brackets(names, br, {"family": "RModel", "m": m})


def nilradical_indices(a: LeibnizAlgebra) -> list[int] | None:
    """Basis positions of the nilradical for catalog families, else None."""
    fam = (a.family or {}).get("family")
    if fam == "Lt":
        return list(range(a.family["n"]))
    if fam in ("R1", "R2"):
        return list(range(a.family["n"]))
    if fam == "RModel":
        return list(range(sum(a.family["m"])))
    if fam == "ModelN":
        return list(range(a.dim))
    return None


def build(family: str, n: int | None = None, alphas=None, m=None) -> LeibnizAlgebra:
    fam = family.lower()
    if fam == "lt":
        return build_Lt(n, alphas if alphas is not None else [0] * (n or 0))
    if fam == "r1":
        return build_R1(n)
    if fam == "r2":
        return build_R2(n)
    if fam in ("modeln", "model"):
        return build_model_nilradical(m)
    if fam == "rmodel":
        return build_R_model(m)
    raise ParameterError(f"unknown family {family!r}")


# --- JSON ---------------------------------------------------------------

_TOP_KEYS = {"dim", "basis", "brackets", "family"}
_ENTRY_KEYS = {"i", "j", "terms"}


def algebra_to_dict(a: LeibnizAlgebra) -> dict:
    out = {
        "dim": a.dim,
        "basis": list(a.basis_names),
        "brackets": [
            {"i": i, "j": j, "terms": [[k, format_scalar(c)] for k, c in terms]}
            for (i, j), terms in a.structure.items()
        ],
    }
    if a.family is not None:
        out["family"] = a.family
    return out


def serialize_algebra(a: LeibnizAlgebra) -> str:
    return json.dumps(algebra_to_dict(a), indent=2) + "\n"


def _is_index(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def algebra_from_dict(data: dict, normalize: bool = False) -> LeibnizAlgebra:
    if not isinstance(data, dict):
        raise SchemaError("$: expected an object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"$: unknown fields {sorted(unknown)}")
    for key in ("dim", "basis", "brackets"):
        if key not in data:
            raise SchemaError(f"$: missing field {key!r}")
    dim = data["dim"]
    if not _is_index(dim) or dim < 0:
        raise SchemaError(f"$.dim: expected a non-negative integer, got {dim!r}")
    basis = data["basis"]
    if not isinstance(basis, list) or len(basis) != dim or not all(isinstance(b, str) for b in basis):
        raise SchemaError(f"$.basis: expected {dim} strings")
    if len(set(basis)) != dim:
        raise SchemaError("$.basis: duplicate basis names")
    if not isinstance(data["brackets"], list):
        raise SchemaError("$.brackets: expected a list")
    structure: dict[tuple[int, int], dict[int, Fraction]] = {}
    for e, entry in enumerate(data["brackets"]):
        loc = f"$.brackets[{e}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{loc}: expected an object")
        if set(entry) != _ENTRY_KEYS:
            raise SchemaError(f"{loc}: expected exactly the fields i, j, terms")
        i, j = entry["i"], entry["j"]
        for name, v in (("i", i), ("j", j)):
            if not _is_index(v) or not 0 <= v < dim:
                raise SchemaError(f"{loc}.{name}: index {v!r} out of range for dim {dim}")
        slot = structure.setdefault((i, j), {})
        if not isinstance(entry["terms"], list):
            raise SchemaError(f"{loc}.terms: expected a list")
        for t, term in enumerate(entry["terms"]):
            tloc = f"{loc}.terms[{t}]"
            if not isinstance(term, list) or len(term) != 2:
                raise SchemaError(f"{tloc}: expected [k, scalar]")
            k, raw = term
            if not _is_index(k) or not 0 <= k < dim:
                raise SchemaError(f"{tloc}: index {k!r} out of range for dim {dim}")
            if k in slot:
                raise SchemaError(f"{tloc}: duplicate term ({i},{j},{k})")
            try:
                c = parse_scalar(raw, normalize=normalize)
            except ValueError as exc:
                raise SchemaError(f"{tloc}: {exc}") from None
            if c == 0 and not normalize:
                raise SchemaError(f"{tloc}: zero coefficients are not stored")
            slot[k] = c
    family = data.get("family")
    if family is not None and not isinstance(family, dict):
        raise SchemaError("$.family: expected an object")
    return LeibnizAlgebra.from_brackets(basis, structure, family)


def parse_algebra(text: str, normalize: bool = False) -> LeibnizAlgebra:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return algebra_from_dict(data, normalize=normalize)


def load_algebra(path, normalize: bool = False) -> LeibnizAlgebra:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read(), normalize=normalize)
