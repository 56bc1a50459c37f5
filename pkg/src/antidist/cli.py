"""Command-line interface: ``antidist <subcommand> ...``.

Exit codes: 0 success, 1 input error, 2 solver non-convergence, 3 a check
or reproduction claim failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import catalog, io, repro
from .analytic import orthogonal_pair_exists, three_state_check
from .exclusion import NORMALIZED, UNNORMALIZED, ExclusionTask, check_povm, exclusion_value, subset_label
from .linalg import NotHermitianError
from .locc import ProtocolError, bipartition_scan, product_locc_antidist_decision, two_step_search, verify_protocol
from .sdp import SdpError
from .states import StateError, gram

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_FAIL = 3


class InputError(Exception):
    pass


def _load_ensemble(args):
    if getattr(args, "builtin", None):
        if getattr(args, "ensemble", None):
            raise InputError("give either an ensemble file or --builtin, not both")
        try:
            return catalog.builtin(args.builtin)
        except (ValueError, StateError) as exc:
            raise InputError(str(exc)) from None
    if not getattr(args, "ensemble", None):
        raise InputError("no ensemble given; pass a JSON file or --builtin NAME")
    return io.ensemble_from_dict(io.load_json_file(args.ensemble))


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(io.dumps(payload))
    else:
        print("\n".join(lines))


def _parse_starter(text: str) -> int:
    t = text.strip().lower()
    names = {"a": 0, "alice": 0, "b": 1, "bob": 1}
    if t in names:
        return names[t]
    if t.isdigit():
        return int(t)
    raise argparse.ArgumentTypeError(f"starter must be A, B or a party index, got {text!r}")


def cmd_antidist(args) -> int:
    e = _load_ensemble(args)
    task = ExclusionTask(e, args.x, args.strong, args.normalization)
    rep = exclusion_value(task)
    payload = io.exclusion_report_to_dict(rep, include_povm=True)
    lines = [
        f"states: {e.n}  dimension: {e.dim}  x: {args.x}  normalization: {args.normalization}",
        f"value: {rep.value:.6f}",
        f"value (unnormalized sum): {rep.value_unnormalized:.6f}",
    ]
    if args.strong:
        why = f"smallest outcome weight {rep.strong_margin:.3e}" if rep.perfect else "value < 1"
        lines.append(f"strong: {str(bool(rep.strong)).lower()}  ({why})")
    cert = rep.certificate
    lines.append(
        f"certificate: {'ok' if cert.certified else 'NOT certified'}  gap {cert.gap:.2e}  "
        f"primal residual {cert.primal_residual:.2e}  dual infeasibility {cert.dual_infeasibility:.2e}"
    )
    for reason in cert.reasons:
        lines.append(f"  {reason}")
    if args.show_povm:
        for s in rep.povm.labels():
            lines.append(f"M[{subset_label(s)}] (trace {rep.traces[s]:.6f}):")
            lines.append(np.array2string(np.round(rep.povm.outcomes[s], 6), max_line_width=120))
    _emit(args, payload, lines)
    return EXIT_OK if rep.converged and cert.certified else EXIT_NUMERIC


def cmd_locc(args) -> int:
    e = _load_ensemble(args)
    if args.bipartitions:
        scan = bipartition_scan(e)
        lines = [f"global value: {scan.global_value:.6f}"]
        for b in scan.bipartitions:
            side = " | ".join(
                "-" if v is None else ("antidist" if v.antidistinguishable else "not antidist") for v in b.side_checks
            )
            lines.append(
                f"bipartition {list(b.block)} | {list(b.rest)}: "
                f"LOCC {'true' if b.decision.antidistinguishable else 'false'}  (three-state check: {side})"
            )
        lines.append(f"genuine: {str(scan.genuine).lower()}")
        _emit(args, scan.to_dict(), lines)
        return EXIT_OK
    if not e.is_product:
        raise InputError(
            "locc needs product states: the local-marginal criterion and the structured search "
            "assume every state factorizes; check protocols for entangled states with verify-protocol"
        )
    payload = {}
    lines = []
    if args.x == 1 and e.is_product:
        dec = product_locc_antidist_decision(e)
        payload["decision"] = dec.to_dict()
        lines.append(
            f"LOCC antidistinguishable: {str(dec.antidistinguishable).lower()}"
            + (f" (party {dec.witness_party} alone)" if dec.witness_party is not None else "")
        )
        lines.append("marginal values: " + ", ".join(f"{v:.6f}" for v in dec.marginal_values))
    if e.n_parties != 2:
        _emit(args, payload, lines)
        return EXIT_OK
    res = two_step_search(e, args.starter, args.x, args.strong)
    payload["search"] = res.to_dict(e.labels)
    kind = "strong " if args.strong else ""
    lines.append(f"{kind}x = {args.x}, starter {'AB'[args.starter]}: {'success' if res.success else 'failure'} ({res.message})")
    if res.success and res.protocol is not None:
        lines.append(f"protocol ({res.mode}):")
        for leaf in res.verification.leaves:
            if leaf.pruned:
                continue
            path = " > ".join(f"{'AB'[p]}{i}" for p, i in leaf.path)
            lines.append(f"  {path}: excludes {{{', '.join(e.labels[k] for k in leaf.claims)}}}")
    for b in [] if res.success else res.blocking:
        if b.responder_x == 0 and not b.survivors:
            continue
        states = ", ".join(e.labels[k] for k in b.survivors)
        gone = ", ".join(e.labels[k] for k in b.excluded) or "nothing"
        extra = ""
        if b.three_state is not None:
            extra = f"; three-state check {'true' if b.three_state.antidistinguishable else 'false'}"
        val = "" if b.responder_value is None else f" value {b.responder_value:.6f}"
        lines.append(f"  blocking: starter excludes {gone}; responder must {b.responder_x}-exclude {{{states}}}{val}{extra}")
    if res.unreachable and args.strong:
        lines.append("unreachable: " + ", ".join("{" + ", ".join(e.labels[k] for k in s) + "}" for s in res.unreachable))
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_three_state_check(args) -> int:
    pair = None
    if args.values:
        if len(args.values) != 3:
            raise InputError("give exactly three squared overlaps x1 x2 x3")
        try:
            xs = [catalog.eval_number(v) for v in args.values]
        except ValueError:
            raise InputError(f"bad number among {args.values}") from None
    else:
        e = _load_ensemble(args)
        if e.n != 3:
            raise InputError(f"three-state-check needs three states, got {e.n}")
        xs = list(gram(e).triple_x())
        pair = orthogonal_pair_exists(e)
    try:
        v = three_state_check(*xs, tol=args.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    payload = {
        "x": [io.fmt(t) for t in v.x],
        "condition_a": v.condition_a,
        "condition_b": v.condition_b,
        "antidistinguishable": v.antidistinguishable,
        "boundary": v.boundary,
        "margin": io.fmt(v.margin),
        "orthogonal_pair": None if pair is None else [pair[0] + 1, pair[1] + 1],
    }
    lines = [
        f"x = ({', '.join(f'{t:.6g}' for t in v.x)})",
        f"sum < 1: {str(v.condition_a).lower()}",
        f"(sum - 1)^2 >= 4 x1 x2 x3: {str(v.condition_b).lower()}  (margin {v.margin:.3e})",
        f"antidistinguishable: {str(v.antidistinguishable).lower()}" + ("  [boundary]" if v.boundary else ""),
    ]
    if pair is not None:
        lines.append(f"orthogonal pair: states {pair[0] + 1} and {pair[1] + 1} (antidistinguishable regardless)")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_verify_povm(args) -> int:
    e = _load_ensemble(args)
    povm, x = io.povm_from_dict(io.load_json_file(args.povm))
    x = args.x if x is None else x
    chk = check_povm(ExclusionTask(e, x, normalization=args.normalization), povm, args.tol)
    lines = [
        f"feasible at tol {args.tol:g}: {str(chk.valid).lower()}",
        f"completeness residual: {chk.feasibility.completeness_residual:.3e}",
        f"smallest eigenvalue: {min(chk.feasibility.min_eigenvalues):.3e}",
        f"value achieved: {chk.value:.6f}",
    ]
    if chk.repaired_value is not None:
        lines.append(f"value after repair: {chk.repaired_value:.6f}")
    _emit(args, chk.to_dict(), lines)
    return EXIT_OK if chk.valid else EXIT_FAIL


def cmd_verify_protocol(args) -> int:
    e = _load_ensemble(args)
    tree = io.protocol_from_dict(io.load_json_file(args.protocol))
    try:
        rep = verify_protocol(tree, e, args.x, args.strong, tol=args.tol)
    except ProtocolError as exc:
        _emit(args, {"success": False, "error": str(exc)}, [f"verification failed: {exc}"])
        return EXIT_FAIL
    lines = [f"success: {str(rep.success).lower()}  strong: {str(rep.strong_success).lower()}"]
    for leaf in rep.leaves:
        tag = "  (pruned)" if leaf.pruned else ""
        path = " > ".join(f"P{p}:{i}" for p, i in leaf.path)
        lines.append(f"  {path}: excludes {{{', '.join(e.labels[k] for k in leaf.claims)}}}{tag}")
    if rep.missing:
        lines.append("not covered: " + ", ".join(subset_label(s) for s in rep.missing))
    _emit(args, rep.to_dict(), lines)
    return EXIT_OK if rep.success else EXIT_FAIL


def cmd_repro(args) -> int:
    ids = None if args.claim == "all" else [args.claim]
    try:
        results = repro.run_claims(ids)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    failed = [r for r in results if not r["passed"]]
    if args.json:
        print(json.dumps({"claims": results, "passed": not failed}, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        for r in results:
            print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['id']:<18} [{r['cite']}] {r['description']}")
            print(f"      expected: {r['expected']}")
            print(f"      measured: {json.dumps(r['measured'], sort_keys=True, ensure_ascii=False)}")
        print(f"{len(results) - len(failed)}/{len(results)} claims passed")
    return EXIT_FAIL if failed else EXIT_OK


SWEEP_FAMILIES = {
    "eq-xanti": "eps",
    "bob-xanti": "eps",
    "eq-pbr": "cos2theta",
}


def cmd_sweep(args) -> int:
    family = args.builtin or "bob-xanti"
    base = family.split(":")[0]
    param = args.param or SWEEP_FAMILIES.get(base)
    if param is None:
        raise InputError(f"sweep needs --param for family {base!r}")
    if args.num < 1:
        raise InputError("--num must be at least 1")
    grid = np.linspace(args.start, args.stop, args.num) if args.num > 1 else np.array([args.start])
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    worst = EXIT_OK
    try:
        w = csv.writer(out)
        header = [param, "value", "value_unnormalized", "status"] + (["strong"] if args.strong else [])
        w.writerow(header)
        for t in grid:
            e = catalog.builtin(f"{base}:{param}={float(t)!r}")
            rep = exclusion_value(ExclusionTask(e, args.x, args.strong, args.normalization))
            row = [f"{t:.10g}", f"{rep.value:.12f}", f"{rep.value_unnormalized:.12f}", rep.status]
            if args.strong:
                row.append(str(bool(rep.strong)).lower())
            w.writerow(row)
            if not rep.converged:
                worst = EXIT_NUMERIC
    except (ValueError, StateError) as exc:
        raise InputError(str(exc)) from None
    finally:
        if args.out:
            out.close()
    return worst


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="antidist", description="Antidistinguishability of pure-state ensembles.")
    sub = p.add_subparsers(dest="command", required=True)

    def ensemble_args(sp):
        sp.add_argument("ensemble", nargs="?", help="ensemble JSON file")
        sp.add_argument("--builtin", help=f"named ensemble: {', '.join(catalog.BUILTINS)} (e.g. eq-xanti:eps=0.45)")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("antidist", help="optimal exclusion value and strongness")
    ensemble_args(sp)
    sp.add_argument("--x", type=int, default=1, help="number of states each outcome excludes")
    sp.add_argument("--strong", action="store_true", help="also decide strong x-antidistinguishability")
    sp.add_argument("--normalization", choices=(NORMALIZED, UNNORMALIZED), default=NORMALIZED)
    sp.add_argument("--show-povm", action="store_true", help="print the optimal POVM")
    sp.set_defaults(func=cmd_antidist)

    sp = sub.add_parser("locc", help="one-way LOCC decision and structured protocol search")
    ensemble_args(sp)
    sp.add_argument("--x", type=int, default=1)
    sp.add_argument("--strong", action="store_true")
    sp.add_argument("--starter", type=_parse_starter, default=0, help="A, B or a party index (default A)")
    sp.add_argument("--bipartitions", action="store_true", help="scan every bipartition of a multipartite ensemble")
    sp.set_defaults(func=cmd_locc)

    sp = sub.add_parser("three-state-check", help="closed-form test for three pure states")
    sp.add_argument("values", nargs="*", help="squared overlaps x1 x2 x3 (fractions allowed)")
    sp.add_argument("--ensemble", dest="ensemble", help="ensemble JSON file with three states")
    sp.add_argument("--builtin")
    sp.add_argument("--tol", type=float, default=1e-9, help="boundary tolerance on the product condition")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_three_state_check)

    sp = sub.add_parser("verify-povm", help="check a given measurement on an exclusion task")
    sp.add_argument("povm", help="POVM JSON file")
    ensemble_args(sp)
    sp.add_argument("--x", type=int, default=1, help="used when the POVM file does not say")
    sp.add_argument("--normalization", choices=(NORMALIZED, UNNORMALIZED), default=UNNORMALIZED)
    sp.add_argument("--tol", type=float, default=5e-4)
    sp.set_defaults(func=cmd_verify_povm)

    sp = sub.add_parser("verify-protocol", help="verify a one-way LOCC protocol file")
    sp.add_argument("protocol", help="protocol JSON file")
    ensemble_args(sp)
    sp.add_argument("--x", type=int, default=1)
    sp.add_argument("--strong", action="store_true")
    sp.add_argument("--tol", type=float, default=1e-9, help="largest branch probability counted as zero")
    sp.set_defaults(func=cmd_verify_protocol)

    sp = sub.add_parser("repro", help="run reproduction claims")
    sp.add_argument("claim", nargs="?", default="all", help=f"claim id or 'all' ({', '.join(repro.REGISTRY)})")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_repro)

    sp = sub.add_parser("sweep", help="CSV of exclusion value against a family parameter")
    sp.add_argument("--builtin", default="bob-xanti", help=f"family: {', '.join(SWEEP_FAMILIES)}")
    sp.add_argument("--param", help="parameter name (eps, theta or cos2theta)")
    sp.add_argument("--start", type=float, required=True)
    sp.add_argument("--stop", type=float, required=True)
    sp.add_argument("--num", type=int, default=20)
    sp.add_argument("--x", type=int, default=1)
    sp.add_argument("--strong", action="store_true")
    sp.add_argument("--normalization", choices=(NORMALIZED, UNNORMALIZED), default=NORMALIZED)
    sp.add_argument("--out", help="write CSV here instead of stdout")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for the solver here.
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, io.SchemaError, StateError, ProtocolError, NotHermitianError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SdpError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
