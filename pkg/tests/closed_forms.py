"""Derivation bases written out from their closed-form descriptions.

Each function returns the span of one operator per free parameter, built
directly from the closed-form description rather than from a nullspace.
"""
from leibniz_local.derivations import LinearOperator, OperatorSubspace
from leibniz_local.exactlin import unit


def _op(a, images):
    """images: {source name: {target name: coeff}}."""
    n = a.dim
    cols = {}
    for src, img in images.items():
        v = [0] * n
        for tgt, c in img.items():
            v[a.index(tgt)] += c
        cols[a.index(src)] = tuple(v)
    return LinearOperator.from_images(n, cols)


def der_Lt(a):
    """D(f_j) = a_j f_j, D(x_j) = alpha_j b_j f_j."""
    ops = []
    for j, alpha in enumerate(a.family["alphas"], start=1):
        ops.append(_op(a, {f"f{j}": {f"f{j}": 1}}))
        if alpha:
            ops.append(_op(a, {f"x{j}": {f"f{j}": alpha}}))
    return OperatorSubspace.span(a.dim, ops)


def der_R(a):
    """D(f_i) = alpha_1 f_i + sum_{j>i} alpha_{j-i+1} f_j; for R2 also D(x) = sum beta_j f_j."""
    n = a.family["n"]
    ops = []
    for k in range(1, n + 1):  # alpha_k
        ops.append(_op(a, {f"f{i}": {f"f{i + k - 1}": 1} for i in range(1, n - k + 2)}))
    if a.family["family"] == "R2":
        for j in range(1, n + 1):  # beta_j
            ops.append(_op(a, {"x": {f"f{j}": 1}}))
    return OperatorSubspace.span(a.dim, ops)


def der_R_model(a):
    m = a.family["m"]
    s = len(m)
    # alpha_1: e^1_i -> i e^1_i, e^t_i -> (i-1) e^t_i
    alpha1 = {f"e^1_{i}": {f"e^1_{i}": i} for i in range(1, m[0] + 1)}
    for t in range(2, s + 1):
        for i in range(2, m[t - 1] + 1):
            alpha1[f"e^{t}_{i}"] = {f"e^{t}_{i}": i - 1}
    # alpha_2: e^t_i -> e^t_{i+1}, x_1 -> -e^1_1
    alpha2 = {f"e^{t}_{i}": {f"e^{t}_{i + 1}": 1} for t in range(1, s + 1) for i in range(1, m[t - 1])}
    alpha2["x1"] = {"e^1_1": -1}
    ops = [_op(a, alpha1), _op(a, alpha2)]
    for t in range(2, s + 1):  # beta_t
        ops.append(_op(a, {f"e^{t}_{i}": {f"e^{t}_{i}": 1} for i in range(1, m[t - 1] + 1)}))
    return OperatorSubspace.span(a.dim, ops)


def der_for(a):
    fam = a.family["family"]
    if fam == "Lt":
        return der_Lt(a)
    if fam in ("R1", "R2"):
        return der_R(a)
    if fam == "RModel":
        return der_R_model(a)
    raise ValueError(fam)


__all__ = ["der_Lt", "der_R", "der_R_model", "der_for", "unit"]
