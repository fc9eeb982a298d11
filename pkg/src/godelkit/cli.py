"""Command-line front end.

Exit codes: 0 success or verified, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import arith, constructors, proofs
from .machine import (
    Halted,
    ProgramError,
    SearchBudget,
    assemble,
    decode_program,
    enumerate_domain,
    eval_index,
    index_of,
    k_upper,
)
from .theory import TheorySpec, corpus, load_manifest

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _budget(args) -> SearchBudget:
    try:
        return SearchBudget(args.steps, args.indices, args.enum)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _theory(args) -> TheorySpec:
    if not args.theory:
        raise UsageError("--theory is required (a manifest path or a corpus name)")
    path = Path(args.theory)
    if path.is_file():
        try:
            return load_manifest(path)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad manifest {path}: {exc}") from exc
    known = corpus()
    if args.theory in known:
        return known[args.theory]
    raise UsageError(f"no manifest file or corpus theory named {args.theory!r} (corpus: {', '.join(known)})")


def _index(text: str) -> int:
    """A decimal index, or a path to an assembly file."""
    if text.isdigit():
        return int(text)
    path = Path(text)
    if not path.is_file():
        raise UsageError(f"{text!r} is neither an index nor a program file")
    try:
        return index_of(assemble(path.read_text()))
    except (ProgramError, ValueError) as exc:
        raise UsageError(f"cannot assemble {text}: {exc}") from exc


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.format == "json":
        print(constructors.canonical(payload))
    else:
        print("\n".join(lines))


def _short(n: int, width: int = 60) -> str:
    s = str(n)
    return s if len(s) <= width else f"{s[:20]}...{s[-20:]} ({n.bit_length()} bits)"


# ---------------------------------------------------------------------------
# Machine commands


def cmd_eval(args) -> int:
    i = _index(args.index)
    budget = _budget(args)
    out = eval_index(i, args.input, budget)
    payload = {"index": str(i), "input": str(args.input), "step_limit": budget.step_limit}
    if isinstance(out, Halted):
        payload.update(outcome="halted", value=str(out.value), steps=out.steps)
        text = f"phi_{_short(i)}({args.input}) = {out.value}  [{out.steps} steps]"
    else:
        payload.update(outcome="exhausted")
        text = f"phi_{_short(i)}({args.input}) exhausted {budget.step_limit} steps"
    lines = [text]
    if args.show_program:
        lines.insert(0, decode_program(i).to_text())
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    i = _index(args.index)
    budget = _budget(args)
    dom = enumerate_domain(i, budget)
    payload = {"index": str(i), "budget": budget.to_json(), "domain": dom}
    _emit(args, payload, [f"W_{_short(i)} prefix ({len(dom)} found): {dom}"])
    return EXIT_OK


def cmd_complexity_table(args) -> int:
    budget = _budget(args)
    rows = {m: k_upper(m, budget) for m in range(args.max + 1)}
    payload = {"budget": budget.to_json(), "k_upper": {str(m): v for m, v in rows.items()}}
    lines = ["m  k_upper(m)"]
    lines += [f"{m}  {'>' + str(budget.index_limit) if v is None else v}" for m, v in rows.items()]
    _emit(args, payload, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Constructions


def _replay(args) -> int:
    try:
        data = json.loads(Path(args.replay).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate {args.replay}: {exc}") from exc
    result = constructors.replay(data)
    if result.ok:
        print(f"REPLAY OK ({result.kind})")
        return EXIT_OK
    print(f"REPLAY FAILED ({result.kind}): {result.reason}")
    return EXIT_FAIL


def _certificate_command(kind: str, describe):
    def run(args) -> int:
        if args.replay:
            return _replay(args)
        theory = _theory(args)
        budget = _budget(args)
        params = {}
        if kind == "tower":
            params = {"step": args.step, "depth": 3 if args.depth is None else args.depth}
        cert = constructors.build(kind, theory, budget, params)
        payload = cert.to_json()
        _emit(args, payload, describe(cert))
        if args.output:
            Path(args.output).write_text(constructors.canonical(payload) + "\n")
        return EXIT_OK

    return run


def _kleene_text(c) -> list[str]:
    return [
        f"theory: {c.theory.name or c.theory.kind}",
        f"t = {_short(c.t)}",
        f"unprovable sentence: {arith.to_text(c.unprovable_sentence)}",
        f"phi_t(t) within {c.nonhalt_evidence_budget.step_limit} steps: {'exhausted' if c.run_exhausted else 'HALTED'}",
        f"sentence in bounded theorem trace: {c.sentence_in_trace}",
        f"W_t prefix: {list(c.domain_prefix)}",
    ]


def _chaitin_text(c) -> list[str]:
    return [
        f"theory: {c.theory.name or c.theory.kind}",
        f"c_T = {_short(c.c)}",
        f"trace claims K(w) > e with e >= c_T: {len(c.claims_at_or_above_c)}",
        f"phi_c(0) within budget: {'no halt' if c.run_on_zero is None else c.run_on_zero}",
    ]


def _boolos_text(b) -> list[str]:
    return [
        f"theory: {b.theory.name or b.theory.kind}",
        f"ell_T = {_short(b.ell)}",
        f"len(Boolos_T) = {_short(b.boolos_len)}",
        f"5 * ell_T = {_short(b.bound)}",
        f"len(Boolos_T) < 5 ell_T: {'VERIFIED' if b.holds else 'FAILED'}",
    ]


def _berry_text(e) -> list[str]:
    lines = [f"theory: {e.theory.name or e.theory.kind}", f"b_hat = {e.b_hat}", f"length bound 5 ell_T = {_short(e.bound)}"]
    lines += [f"  {y} defined by {arith.to_text(f)}" for y, f in sorted(e.definability_witnesses.items())]
    return lines


def _tower_text(t) -> list[str]:
    lines = [f"{t.step} tower over {t.base.name or t.base.kind}, depth {t.depth}"]
    for i, lv in enumerate(t.levels):
        lines.append(f"  T_{i}: value {_short(t.sequence[i])}, witness {lv.witness}")
    return lines


def _nonrosser_text(n) -> list[str]:
    return [
        f"theory: {n.theory.name or n.theory.kind}",
        f"u = hbar(lambda) = {_short(n.u)}",
        f"lambda emitted by U at stage: {n.sentence_stage}",
        f"truth: lambda {n.lam_verdict.value}, phi_u(u) halts {n.halt_verdict.value}",
        f"W_u on [0,{n.sample}]: {list(n.domain_sample)}",
        f"U-trace 'phi_n(n) diverges' on [0,{n.sample}]: {list(n.trace_sample)}",
    ]


def cmd_pigeonhole(args) -> int:
    try:
        cap = proofs.PIGEONHOLE_CAP if args.depth is None else args.depth
        proof = proofs.pigeonhole_proof(args.k, cap=cap)
    except proofs.ProofError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    goal = proofs.pigeonhole_formula(args.k)
    # check the serialized form, as a third party would
    ok = proofs.check_proof(proofs.Proof.from_text(proof.to_text()), goal)
    rejected = None
    if args.fuzz:
        rng = random.Random(args.seed)
        rejected = sum(not proofs.check_proof(proofs.mutate_proof(proof, rng), goal) for _ in range(args.fuzz))
    payload = {
        "k": args.k,
        "formula": arith.to_sexpr(goal),
        "proof": proof.to_text().splitlines(),
        "verified": ok,
        "fuzz": None if rejected is None else {"mutations": args.fuzz, "rejected": rejected, "seed": args.seed},
    }
    lines = [arith.to_text(goal), proof.to_text().rstrip(), "VERIFIED" if ok else "REJECTED"]
    if rejected is not None:
        lines.append(f"mutations rejected: {rejected}/{args.fuzz}")
    _emit(args, payload, lines)
    return EXIT_OK if ok and (rejected is None or rejected == args.fuzz) else EXIT_FAIL


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theory", help="theory manifest (JSON) or corpus name")
    common.add_argument("--steps", type=int, default=100_000, help="step limit")
    common.add_argument("--indices", type=int, default=200, help="index / input limit")
    common.add_argument("--enum", type=int, default=200, help="enumeration limit")
    common.add_argument("--depth", type=int, help="tower depth (default 3) or proof-generation cap (default 6)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--replay", metavar="PATH", help="revalidate a stored certificate")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--output", metavar="PATH", help="also write the JSON certificate here")

    parser = argparse.ArgumentParser(prog="godelkit", description="Executable incompleteness constructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="run phi_i on an input")
    p.add_argument("index", help="decimal index or assembly file")
    p.add_argument("input", type=int, nargs="?", default=0)
    p.add_argument("--show-program", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("enumerate", parents=[common], help="dovetailed prefix of W_i")
    p.add_argument("index", help="decimal index or assembly file")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("complexity-table", parents=[common], help="budgeted upper bounds on K(m)")
    p.add_argument("--max", type=int, default=10)
    p.set_defaults(func=cmd_complexity_table)

    described = {
        "kleene": ("Kleene's construction: t with phi_t(t) diverging yet unprovable in T", _kleene_text),
        "chaitin": ("Chaitin's theorem: the constant c_T beyond which T proves no K(w) > e", _chaitin_text),
        "boolos": ("Boolos's Berry sentence: ell_T and the bound len(Boolos_T) < 5 ell_T", _boolos_text),
        "berry-estimate": ("budget-relative lower estimate of the Berry number b_T", _berry_text),
        "tower": ("towers T_{i+1} = T_i + independent sentence (Chaitin or Boolos step)", _tower_text),
        "nonrosser": ("non-Rosser extension U = T + lambda with lambda <-> phi_u(u) halts", _nonrosser_text),
    }
    for name, (help_text, describe) in described.items():
        kind = "berry" if name == "berry-estimate" else name
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "tower":
            p.add_argument("--step", choices=("chaitin", "boolos"), default="chaitin")
        p.set_defaults(func=_certificate_command(kind, describe))

    p = sub.add_parser("pigeonhole", parents=[common], help="generate and check a Q-proof of the pigeonhole lemma")
    p.add_argument("k", type=int)
    p.add_argument("--fuzz", type=int, default=0, help="also check N single-line mutations are rejected")
    p.set_defaults(func=cmd_pigeonhole)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except constructors.ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
