"""Acceptance criteria 1-11.  Each test records one PASS/FAIL line (see conftest)."""

import json
import random
import time

from godelkit import arith
from godelkit.arith import Eq, Exists, ForAll, Implies, Less, Not, Num, Var, And
from godelkit.cli import main
from godelkit.constructors import (
    boolos_bundle, chaitin_constant, check_diagonal, kleene_index,
)
from godelkit.machine import (
    Halted, SearchBudget, curry_transformer, enumerate_domain, eval_binary, eval_index, fixed_point,
    index_of, k_upper, refute_lower_bounder, smn,
)
from godelkit.proofs import check_proof, mutate_proof, pigeonhole_formula, pigeonhole_proof
from godelkit.theory import corpus, extend, kT_enumerator, stream

BINARY_SRC = {
    "add": "PRIM FST 1 0 0\nPRIM SND 2 0 0\nPRIM ADD 0 1 2\nHALT",
    "mul": "PRIM FST 1 0 0\nPRIM SND 2 0 0\nPRIM MUL 0 1 2\nHALT",
    "a-x": "PRIM FST 1 0 0\nPRIM SND 2 0 0\nPRIM MONUS 0 1 2\nHALT",
    "x-a": "PRIM FST 1 0 0\nPRIM SND 2 0 0\nPRIM MONUS 0 2 1\nHALT",
    "fst": "PRIM FST 0 0 0\nHALT",
    "snd": "PRIM SND 0 0 0\nHALT",
    "eq": "PRIM FST 1 0 0\nPRIM SND 2 0 0\nSET 0 0\nJEQ 1 2 yes\nHALT\nyes:\nINC 0\nHALT",
    # counts x down to a, then outputs 2a; diverges when x < a
    "slow": "PRIM FST 1 0 0\nPRIM SND 2 0 0\nloop:\nJEQ 1 2 ok\nDECJZ 2 stuck\nJMP loop\n"
            "stuck:\nJMP stuck\nok:\nPRIM ADD 0 1 2\nHALT",
}
BINARY = {k: index_of(v) for k, v in BINARY_SRC.items()}


def _random_program(rng):
    n = rng.randrange(2, 8)
    lines = []
    for _ in range(n):
        op = rng.choice(["INC", "DECJZ", "SET", "JEQ", "PRIM"])
        r = lambda: rng.randrange(4)  # noqa: E731
        if op == "INC":
            lines.append(f"INC {r()}")
        elif op == "DECJZ":
            lines.append(f"DECJZ {r()} {rng.randrange(n + 1)}")
        elif op == "SET":
            lines.append(f"SET {r()} {rng.randrange(20)}")
        elif op == "JEQ":
            lines.append(f"JEQ {r()} {r()} {rng.randrange(n + 1)}")
        else:
            lines.append(f"PRIM {rng.choice(['ADD', 'MUL', 'MONUS', 'FST', 'SND', 'PAIR', 'MOD'])} {r()} {r()} {r()}")
    lines.append("HALT")
    return index_of("\n".join(lines))


def test_criterion_01_smn(report):
    rng = random.Random(1)
    pool = list(BINARY.values()) + [_random_program(rng) for _ in range(40)]
    start = time.perf_counter()
    agree = 0
    for _ in range(100):
        i, a, x = rng.choice(pool), rng.randrange(50), rng.randrange(50)
        direct = eval_binary(i, a, x, 10**5)
        # the s-m-n prefix costs exactly 3 steps, so the curried run gets 3 more
        curried = eval_index(smn(i, a), x, 10**5 + 3)
        if isinstance(direct, Halted):
            agree += isinstance(curried, Halted) and curried.value == direct.value and curried.steps == direct.steps + 3
        else:
            agree += not isinstance(curried, Halted)
    elapsed = time.perf_counter() - start
    report(1, agree == 100 and elapsed < 10, f"s-m-n agreement {agree}/100 in {elapsed:.2f}s")


def _transformers():
    consts = [index_of(s) for s in ("HALT", "INC 0", "INC 0\nINC 0", "SET 0 42\nHALT", "JEQ 0 0 0", "")]
    out = [index_of(f"SET 0 {c}\nHALT") for c in consts]
    out += [curry_transformer(g) for g in BINARY.values()]
    out += [
        0,  # identity transformer
        index_of("INC 0"),
        index_of("SET 1 2\nPRIM MOD 0 0 1\nHALT"),
        index_of(f"SET 1 {BINARY['fst']}\nPRIM SMN 0 1 0\nINC 0\nHALT"),
        index_of(f"SET 0 {BINARY['add']}\nSET 1 7\nPRIM SMN 0 0 1\nHALT"),
        index_of(f"SET 1 {BINARY['eq']}\nPRIM SMN 0 1 0\nHALT"),
    ]
    return out


def test_criterion_02_recursion_theorem(report):
    fs = _transformers()
    checked = failures = 0
    for f in fs:
        e = fixed_point(f)
        fe = eval_index(f, e, 10**5)
        assert isinstance(fe, Halted), "transformers are total"
        for x in range(11):
            lhs, rhs = eval_index(e, x, 10**5), eval_index(fe.value, x, 10**5)
            if not (isinstance(lhs, Halted) or isinstance(rhs, Halted)):
                continue
            checked += 1
            # e first computes f(e) and then runs it, so give each side room for the other's overhead
            lhs, rhs = eval_index(e, x, 10**6), eval_index(fe.value, x, 10**6)
            if not (isinstance(lhs, Halted) and isinstance(rhs, Halted) and lhs.value == rhs.value):
                failures += 1
    report(2, len(fs) == 20 and failures == 0 and checked > 0,
           f"{len(fs)} transformers, {checked} halting (e, x) checks, {failures} mismatches")


def test_criterion_03_lower_bounders(report):
    sources = [
        "SET 0 0\nHALT", "HALT", "INC 0\nHALT", "PRIM ADD 0 0 0\nHALT", "PRIM MUL 0 0 0\nHALT",
        "SET 1 7\nPRIM MOD 0 0 1\nHALT", "SET 1 100\nPRIM ADD 0 0 1\nHALT", "PRIM FST 0 0 0\nHALT",
        "SET 0 1024\nHALT", "SET 1 3\nPRIM DIV 0 0 1\nHALT",
    ]
    budget = SearchBudget(10**5, 20, 20)
    ok = 0
    errors = []
    for src in sources:
        try:
            e, v = refute_lower_bounder(index_of(src), budget)
            ku = k_upper(v, budget, candidates=[e])
            ok += ku is not None and ku <= e
        except Exception as exc:  # the criterion counts exceptions
            errors.append(repr(exc))
    report(3, ok == 10 and not errors, f"{ok}/10 refuted, {len(errors)} exceptions")


def test_criterion_04_cardinality(report):
    budget = SearchBudget(10**4, 8, 8)
    outputs = {eval_index(i, 0, budget).value for i in range(9) if isinstance(eval_index(i, 0, budget), Halted)}
    ms = sorted(outputs | set(range(60)))
    table = {m: k_upper(m, budget) for m in ms}
    sizes = [sum(1 for v in table.values() if v is not None and v <= e) for e in range(9)]
    report(4, all(s <= e + 1 for e, s in enumerate(sizes)), f"|{{m : k_upper(m) <= e}}| for e = 0..8: {sizes}")


def test_criterion_05_pigeonhole(report):
    rng = random.Random(5)
    verified = rejected = total = 0
    for k in range(5):
        proof, goal = pigeonhole_proof(k), pigeonhole_formula(k)
        verified += check_proof(proof, goal)
        for _ in range(100):
            total += 1
            rejected += not check_proof(mutate_proof(proof, rng), goal)
    report(5, verified == 5 and rejected == total, f"{verified}/5 proofs verified, {rejected}/{total} mutations rejected")


def test_criterion_06_length_laws(report):
    num_ok = all(arith.length(arith.numeral(m)) == 3 * m + 1 for m in range(1001))
    var_ok = all(arith.length(Var(k)) == k for k in range(1, 51))
    report(6, num_ok and var_ok, f"numerals m <= 1000: {num_ok}; variables k <= 50: {var_ok}")


def test_criterion_07_boolos_bound(report):
    theories = list(corpus().values()) + [extend(corpus()["Q"], Eq(Num(0), Num(0)), "Q+")]
    results = [(t.name, boolos_bundle(t)) for t in theories]
    ok = all(b.boolos_len < 5 * b.ell for _, b in results)
    slack = min(5 * b.ell - b.boolos_len for _, b in results)
    report(7, ok and len(theories) >= 5, f"{len(theories)} theories, bound holds, minimum slack {slack} symbols")


def test_criterion_08_kleene(report):
    c = corpus()
    t = kT_enumerator(c["kleene-2-5"])
    dom = [n for n in enumerate_domain(t, SearchBudget(10**6, 100, 200)) if n <= 100]
    t_empty = kleene_index(c["empty"], SearchBudget(10**6, 10, 10)).t
    run = eval_index(t_empty, t_empty, 10**6)
    report(8, dom == [2, 5] and not isinstance(run, Halted),
           f"W_t on [0,100] = {dom}; empty theory phi_t(t) at 10^6 steps: {run}")


def test_criterion_09_chaitin(report):
    budget = SearchBudget(10**5, 30, 30)
    c = corpus()
    deterministic = all(chaitin_constant(t, budget).c == chaitin_constant(corpus()[n], budget).c for n, t in c.items())
    consistent = [n for n, t in c.items() if "consistent" in t.meta_flags]
    clean = all(chaitin_constant(c[n], budget).evidence_holds for n in consistent)
    adv = chaitin_constant(c["adversary"], budget)
    mechanics = bool(adv.claims_at_or_above_c) and all(
        e >= adv.c and adv.run_on_zero == w for w, e in adv.claims_at_or_above_c
    )
    report(9, deterministic and clean and mechanics,
           f"deterministic {deterministic}; no claims on {consistent}; adversary phi_c(0) = {adv.run_on_zero} "
           f"= claimed w with e >= c_T: {mechanics}")


def test_criterion_10_replay(report, tmp_path, capsys):
    small = ["--steps", "5000", "--indices", "10", "--enum", "10"]
    jobs = []
    for name in corpus():
        for cmd in ("kleene", "chaitin", "boolos", "berry-estimate", "nonrosser"):
            jobs.append((cmd, name, []))
    jobs += [("tower", "empty", ["--depth", "1", "--step", "chaitin"]),
             ("tower", "Q", ["--depth", "1", "--step", "boolos"])]
    ok = 0
    for n, (cmd, name, extra) in enumerate(jobs):
        path = tmp_path / f"{n}.json"
        assert main([cmd, "--theory", name, *small, *extra, "--output", str(path), "--format", "json"]) == 0
        ok += main([cmd, "--replay", str(path)]) == 0
        capsys.readouterr()
    report(10, ok == len(jobs), f"{ok}/{len(jobs)} certificates replayed bit-identically")


def test_criterion_11_diagonal(report):
    identity = stream("HALT", "identity")  # emits k on input k, so every code is "provable"
    x = Var(1)
    templates = [
        Eq(x, x),
        Less(x, Num(0)),
        Exists(2, And(Less(Var(2), x), Eq(Var(2), Num(0)))),
        Not(arith.pr_formula(identity, x)),
        Exists(2, arith.Rel("Halts", (Num(7), x, Var(2)))),
    ]
    budget = SearchBudget(10**4, 20, 20)
    checks = [check_diagonal(t, budget) for t in templates]
    good = sum(c.agree and c.lam_verdict.definite for c in checks)
    report(11, good == 5, f"{good}/5 templates: " + ", ".join(c.lam_verdict.value for c in checks))
