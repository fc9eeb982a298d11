import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from godelkit.machine import (
    CANONICAL_LOOP,
    Exhausted,
    Halted,
    Instr,
    Machine,
    OPCODES,
    Program,
    ProgramError,
    SearchBudget,
    assemble,
    decode_program,
    dovetail,
    encode_program,
    enumerate_domain,
    eval_binary,
    eval_index,
    index_of,
    is_well_formed_index,
    k_upper,
    pair,
    smn,
    statically_diverges,
    unpair,
)

ARITY = {"HALT": 0, "INC": 1, "DECJZ": 2, "SET": 2, "JEQ": 3, "PRIM": 4, "CALL": 3, "RUN": 4}


def oracle_index(instrs):
    """Independent encoder: 3-bit opcode, Elias-delta operands, bijective binary."""
    bits = []
    for op, args in instrs:
        bits.append(format(OPCODES.index(op), "03b"))
        for a in args:
            n = a + 1
            length = n.bit_length()
            bits.append("0" * (length.bit_length() - 1) + format(length, "b") + format(n, "b")[1:])
    s = "".join(bits)
    # bijective binary: string s <-> 2**len(s) - 1 + int(s)
    return (1 << len(s)) - 1 + (int(s, 2) if s else 0)


def test_known_indices():
    assert index_of("HALT") == 7 == oracle_index([("HALT", ())])
    assert index_of("INC 0\nHALT") == 151 == oracle_index([("INC", (0,)), ("HALT", ())])
    assert decode_program(0) == Program(())


def test_first_well_formed_indices_frozen():
    # frozen from the oracle encoder: every program of <= 8 coded bits
    assert [i for i in range(160) if is_well_formed_index(i)] == [0, 7, 18, 42, 46, 63, 102, 118, 130, 147, 148, 151]


def test_oracle_matches_encoder_on_random_programs():
    rng = random.Random(5)
    for _ in range(300):
        instrs = []
        for _ in range(rng.randrange(1, 6)):
            op = rng.choice(["HALT", "INC", "SET", "JEQ", "DECJZ"])
            args = tuple(rng.randrange(8) for _ in range(ARITY[op]))
            if op in ("DECJZ", "JEQ"):
                args = args[:-1] + (0,)
            instrs.append((op, args))
        p = Program(tuple(Instr(op, a) for op, a in instrs))
        assert encode_program(p) == oracle_index(instrs)


@given(st.integers(min_value=0, max_value=10**30))
def test_decoding_is_total_and_well_formed_round_trips(n):
    p = decode_program(n)
    if is_well_formed_index(n):
        assert encode_program(p) == n
    else:
        assert p == CANONICAL_LOOP


@given(st.integers(0, 10**12), st.integers(0, 10**12))
def test_pair_unpair(a, b):
    assert unpair(pair(a, b)) == (a, b)


@given(st.integers(0, 10**9))
def test_unpair_pair(z):
    assert pair(*unpair(z)) == z


def test_eval_basics():
    assert eval_index(7, 7, 10) == Halted(7)
    assert eval_index(151, 4, 10) == Halted(5)
    assert eval_index(0, 9, 10) == Halted(9)
    loop = index_of("JEQ 0 0 0")
    assert isinstance(eval_index(loop, 3, 10_000), Exhausted)
    assert statically_diverges(loop) and not statically_diverges(7)


def test_falling_off_the_end_halts():
    assert eval_index(index_of("INC 0\nINC 0"), 1, 10) == Halted(3)


def test_prims_and_calls():
    add = index_of("PRIM FST 1 0 0\nPRIM SND 2 0 0\nPRIM ADD 0 1 2\nHALT")
    assert eval_binary(add, 3, 4, 100) == Halted(7)
    caller = index_of(f"SET 1 {add}\nSET 2 {pair(5, 6)}\nCALL 0 1 2\nHALT")
    assert eval_index(caller, 0, 100) == Halted(11)


def test_run_reports_timeout_as_zero():
    loop = index_of("JEQ 0 0 0")
    prog = index_of(f"SET 1 {loop}\nSET 2 50\nRUN 0 1 0 2\nHALT")
    out = eval_index(prog, 0, 1000)
    assert out == Halted(0)
    ok = index_of(f"SET 1 151\nSET 2 50\nRUN 0 1 0 2\nHALT")
    assert eval_index(ok, 4, 1000) == Halted(6)


def test_pow_cost_independent_of_chunking():
    p = index_of("SET 1 2\nSET 2 40000\nPRIM POW 0 1 2\nHALT")
    whole = eval_index(p, 0, 10**6)
    m = Machine(p, 0)
    while m.advance(1) is None:
        pass
    assert whole.steps == m.steps and whole.value == 2**40000


def test_pow_beyond_budget_is_not_computed():
    p = index_of("SET 1 2\nSET 2 1000000000000\nPRIM POW 0 1 2\nHALT")
    assert isinstance(eval_index(p, 0, 10_000), Exhausted)


def test_program_validation():
    with pytest.raises(ProgramError):
        assemble("INC 64")
    with pytest.raises(ProgramError):
        assemble("DECJZ 0 9")
    with pytest.raises(ProgramError):
        assemble("FROB 1")


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(0, 1, 1)
    b = SearchBudget(5, 6, 7)
    assert SearchBudget.from_json(b.to_json()) == b


def test_smn_small():
    mul = index_of("PRIM FST 1 0 0\nPRIM SND 2 0 0\nPRIM MUL 0 1 2\nHALT")
    for a in range(5):
        for x in range(5):
            assert eval_index(smn(mul, a), x, 100) == Halted(a * x)


def test_dovetail_deterministic_and_ordered():
    b = SearchBudget(5000, 20, 50)
    evens = index_of("SET 1 2\nPRIM MOD 2 0 1\nSET 3 0\nJEQ 2 3 done\nloop:\nJMP loop\ndone:\nHALT")
    hits = list(dovetail(evens, b))
    assert [h.input for h in hits] == list(range(0, 21, 2))
    assert hits == list(dovetail(evens, b))
    assert all(h1.stage <= h2.stage for h1, h2 in zip(hits, hits[1:]))
    assert enumerate_domain(evens, b) == list(range(0, 21, 2))


def test_dovetail_step_limit_is_total():
    loop = index_of("JEQ 0 0 0")
    assert list(dovetail(loop, SearchBudget(100, 1000, 10))) == []


def test_k_upper():
    b = SearchBudget(1000, 200, 10)
    assert k_upper(0, b) == 0
    assert k_upper(1, b) == 18
    const = index_of("SET 0 1000\nHALT")
    assert k_upper(1000, b) is None
    assert k_upper(1000, b, candidates=[const]) == const
