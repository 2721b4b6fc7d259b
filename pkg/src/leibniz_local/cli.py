"""Command-line front end.

Exit codes:
    0  certified / verified
    1  usage, input or IO error
    2  candidate gap / not certified
    3  refuted
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from . import __version__
from .algebra import check_leibniz_identity, series
from .catalog import ParameterError, SchemaError, build, load_algebra, serialize_algebra
from .derivations import (
    LinearOperator,
    derivation_space,
    inner_derivation_space,
    is_derivation,
    lie_closure_check,
)
from .localder import (
    SampleStatus,
    Status,
    build_counterexample_local,
    certify_locder_equals_der,
    closed_form_witness,
    sample_vector,
    sampled_local_check,
)
from .twolocal import (
    TwoLocalStatus,
    build_nabla,
    certify_twolocal_equals_der,
    rank_one_derivation_pencil,
    refute_additivity,
    verify_twolocal_property,
)

EXIT_OK, EXIT_USAGE, EXIT_GAP, EXIT_REFUTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _strs(v) -> list[str]:
    return [str(c) for c in v]


def _load_checked(path: str, normalize: bool):
    try:
        a = load_algebra(path, normalize=normalize)
    except (OSError, SchemaError, IndexError, ValueError) as exc:
        raise UsageError(f"cannot load {path}: {exc}") from None
    violations = check_leibniz_identity(a)
    if violations:
        shown = "; ".join(f"({i},{j},{k}) -> {_strs(r)}" for i, j, k, r in violations[:5])
        raise UsageError(f"{path} violates the Leibniz identity at {len(violations)} triples: {shown}")
    return a


def _report(args, command: str, verdicts: dict, timings: dict) -> dict:
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "json", "jobs")}
    return {
        "command": command,
        "inputs": inputs,
        "seed": getattr(args, "seed", None),
        "verdicts": verdicts,
        "timings": timings,
        "tool_version": __version__,
    }


def _write_json(path: Optional[str], report: dict) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")


def cmd_catalog(args) -> int:
    try:
        a = build(args.family, n=args.n, alphas=args.alphas, m=args.m)
    except (ParameterError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    text = serialize_algebra(a)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {a.family['family']} (dim {a.dim}) to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_der(args) -> int:
    t0 = time.perf_counter()
    a = _load_checked(args.algebra, args.normalize)
    der = derivation_space(a)
    inner = inner_derivation_space(a)
    lower = series(a, "lower_central")
    derived = series(a, "derived")
    verdicts = {
        "dim": a.dim,
        "der_dim": der.dim,
        "inner_dim": inner.dim,
        "inner_equals_der": inner.dim == der.dim and der.contains_space(inner),
        "der_is_lie_algebra": lie_closure_check(der),
        "lower_central_dims": list(lower.dims),
        "nilpotent": lower.verdict,
        "derived_dims": list(derived.dims),
        "solvable": derived.verdict,
        "der_basis": [op.to_dict() for op in der.basis],
    }
    print(f"algebra: {args.algebra} (dim {a.dim})")
    print(f"dim Der = {der.dim}, dim Inner = {inner.dim}, Inner = Der: {verdicts['inner_equals_der']}")
    print(f"lower central series {list(lower.dims)}: {lower.verdict}")
    print(f"derived series {list(derived.dims)}: {derived.verdict}")
    for idx, op in enumerate(der.basis):
        images = {a.basis_names[j]: _strs(col) for j, col in enumerate(op.columns) if any(col)}
        print(f"  D{idx + 1}: {images}")
    _write_json(args.json, _report(args, "der", verdicts, {"total_s": time.perf_counter() - t0}))
    return EXIT_OK


def cmd_locder(args) -> int:
    t0 = time.perf_counter()
    a = _load_checked(args.algebra, args.normalize)
    der = derivation_space(a)
    verdicts: dict = {}
    code = EXIT_OK

    if args.operator:
        try:
            with open(args.operator, encoding="utf-8") as fh:
                op = LinearOperator.from_dict(json.load(fh), args.normalize)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot load operator {args.operator}: {exc}") from None
        if op.dim != a.dim:
            raise UsageError(f"operator dim {op.dim} != algebra dim {a.dim}")
        residuals = is_derivation(a, op)
        sv = sampled_local_check(op, der, args.trials, args.seed, args.jobs)
        verdicts["operator"] = {
            "is_derivation": not residuals,
            "residuals": [{"i": i, "j": j, "residual": _strs(r)} for i, j, r in residuals[:20]],
            "sampled": sv.to_dict(),
        }
        print(f"operator {args.operator}: derivation={not residuals}; sampled check {sv.status.value} ({sv.kind})")
        if sv.status is SampleStatus.REFUTED_AT:
            print(f"  not local: no derivation matches at {_strs(sv.refuting_vector)}")
            code = EXIT_REFUTED

    verdict = certify_locder_equals_der(a, args.strategy, args.max_rounds, args.seed, der)
    verdicts["certify"] = verdict.to_dict()
    print(f"strategy {args.strategy}: {verdict.status.value} (dim CS = {verdict.cs_dim}, dim Der = {verdict.der_dim}, "
          f"{len(verdict.schedule)} schedule vectors)")
    if verdict.note:
        print(f"  {verdict.note}")

    if verdict.status is Status.CANDIDATE_GAP:
        gap_checks = []
        for g in verdict.gap_basis:
            sv = sampled_local_check(g, der, args.trials, args.seed, args.jobs)
            gap_checks.append(sv.to_dict())
        verdicts["gap_checks"] = gap_checks
        print(f"  {len(verdict.gap_basis)} gap elements; sampled locality: "
              + ", ".join(c["status"] for c in gap_checks))
        fam = (a.family or {}).get("family")
        if fam in ("R1", "R2") and a.family.get("n", 0) >= 3:
            n = a.family["n"]
            delta = build_counterexample_local(fam, n)
            residuals = is_derivation(a, delta)
            sv = sampled_local_check(delta, der, args.trials, args.seed, args.jobs)
            closed_ok = all(
                der.contains(closed_form_witness(n, x)) and closed_form_witness(n, x).apply(x) == delta.apply(x)
                for x in (sample_vector(a.dim, args.seed, i) for i in range(args.trials))
            )
            verdicts["counterexample"] = {
                "operator": delta.to_dict(),
                "is_derivation": not residuals,
                "residuals": [{"i": i, "j": j, "residual": _strs(r)} for i, j, r in residuals],
                "sampled": sv.to_dict(),
                "closed_form_witnesses_ok": closed_ok,
            }
            print(f"  counterexample 2*xi_1 f_{n - 1} + xi_2 f_{n}: derivation={not residuals}, "
                  f"sampled locality {sv.status.value} over {args.trials} trials, closed-form witnesses ok={closed_ok}")
        if code == EXIT_OK:
            code = EXIT_GAP

    _write_json(args.json, _report(args, "locder", verdicts, {"total_s": time.perf_counter() - t0}))
    return code


def cmd_twolocal(args) -> int:
    t0 = time.perf_counter()
    a = _load_checked(args.algebra, args.normalize)
    der = derivation_space(a)
    verdicts: dict = {}
    if args.mode == "certify":
        v = certify_twolocal_equals_der(a, args.samples, args.seed, der)
        verdicts["certify"] = v.to_dict()
        print(f"2-local certification: {v.status.value} (dim Der = {v.der_dim})")
        print(f"  {v.search.note}")
        if v.search.found:
            print(f"  separating element q = {_strs(v.search.found.q)}")
        code = EXIT_OK if v.status is TwoLocalStatus.CERTIFIED else EXIT_GAP
    else:
        w = None
        if args.w is not None:
            if args.w not in a.basis_names:
                raise UsageError(f"unknown basis element {args.w!r}")
            w = a.basis_vector(args.w)
        spec = build_nabla(a, w, der)
        if spec is None:
            targets = [args.w] if args.w else list(a.basis_names)
            dims = {name: len(rank_one_derivation_pencil(der, a.basis_vector(name))) for name in targets}
            verdicts["pencil_dims"] = dims
            print(f"no rank-one derivation pencil of dimension >= 2; pencil dims {dims}")
            code = EXIT_GAP
        else:
            pv = verify_twolocal_property(spec, args.pairs, args.seed)
            verdicts["nabla"] = spec.to_dict()
            verdicts["pairs"] = pv.to_dict()
            print(f"nabla: l1={_strs(spec.l1)} l2={_strs(spec.l2)} w={_strs(spec.w)}")
            print(f"  pairs: {pv.status.value} ({pv.unique_pairs} unique-solution, "
                  f"{pv.proportional_pairs} proportional)")
            if pv.status is TwoLocalStatus.FAILED_PAIR:
                code = EXIT_REFUTED
            else:
                u, v = refute_additivity(spec)
                verdicts["additivity_witness"] = {"u": _strs(u), "v": _strs(v)}
                print(f"  not additive: u={_strs(u)} v={_strs(v)}")
                code = EXIT_OK
    _write_json(args.json, _report(args, "twolocal", verdicts, {"total_s": time.perf_counter() - t0}))
    return code


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="leibniz-local", description="Derivations, local and 2-local derivations of Leibniz algebras")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("catalog", help="emit a catalog algebra as JSON")
    c.add_argument("family", choices=["lt", "r1", "r2", "modeln", "rmodel"], type=str.lower)
    c.add_argument("--n", type=int)
    c.add_argument("--alphas", type=_ints, help="comma-separated values in {-1,0} (lt only)")
    c.add_argument("--m", type=_ints, help="comma-separated chain lengths (modeln, rmodel)")
    c.add_argument("--out", help="output path (default stdout)")
    c.set_defaults(func=cmd_catalog)

    def common(sp):
        sp.add_argument("algebra", help="algebra JSON file")
        sp.add_argument("--json", help="write the full report here")
        sp.add_argument("--normalize", action="store_true", help="accept non-canonical scalars")

    d = sub.add_parser("der", help="derivation and inner derivation spaces")
    common(d)
    d.set_defaults(func=cmd_der)

    loc = sub.add_parser("locder", help="local derivations")
    common(loc)
    loc.add_argument("--seed", type=int, required=True)
    loc.add_argument("--strategy", choices=["paper", "greedy"], default="greedy")
    loc.add_argument("--trials", type=int, default=1000)
    loc.add_argument("--max-rounds", type=int, default=5)
    loc.add_argument("--operator", help="operator JSON to test for locality")
    loc.add_argument("--jobs", type=int, default=1)
    loc.set_defaults(func=cmd_locder)

    tw = sub.add_parser("twolocal", help="2-local derivations")
    common(tw)
    tw.add_argument("--seed", type=int, required=True)
    tw.add_argument("--mode", choices=["certify", "counterexample"], default="certify")
    tw.add_argument("--pairs", type=int, default=1000)
    tw.add_argument("--samples", type=int, default=1000, help="random candidates for the separating search")
    tw.add_argument("--w", help="basis element used as the image of the rank-one pencil")
    tw.set_defaults(func=cmd_twolocal)
    return p


def _join_negative_lists(argv: list[str]) -> list[str]:
    # argparse reads "--alphas -1,0" as two options; glue the value on
    out, i = [], 0
    while i < len(argv):
        if argv[i] in ("--alphas", "--m") and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_join_negative_lists(argv))
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
