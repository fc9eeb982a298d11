import random

import pytest

from godelkit.arith import (
    BOTTOM, Eq, ForAll, Implies, Num, Var, ZERO, godel_encode, halt_formula, nonhalt_formula,
)
from godelkit.machine import Halted, SearchBudget, enumerate_domain, eval_index
from godelkit.proofs import Q_AXIOMS
from godelkit.theory import (
    TheorySpec, Unknown, Yes, axiomatic, corpus, derivation_code, derive, extend, kT_enumerator,
    load_manifest, proves, stream, theorem_stream,
)
from godelkit.truth import Verdict, sigma1_truth

B = SearchBudget(20_000, 40, 40)


def test_corpus_contents():
    c = corpus()
    assert set(c) == {"empty", "zero-eq-zero", "kleene-2-5", "Q", "identity", "adversary"}
    assert theorem_stream(c["empty"], B).items == ()
    assert theorem_stream(c["zero-eq-zero"], B).codes == [godel_encode(Eq(ZERO, ZERO))]
    assert set(theorem_stream(c["kleene-2-5"], B).codes) == {
        godel_encode(nonhalt_formula(2, 2)), godel_encode(nonhalt_formula(5, 5))
    }


def test_q_emits_its_axioms():
    q = corpus()["Q"]
    for ax in Q_AXIOMS.values():
        assert isinstance(proves(q, ax, B), Yes)
    assert proves(q, BOTTOM, B) == Unknown()


def test_derivations():
    ax = (ForAll(1, Eq(Var(1), Var(1))),)
    inst = Implies(ax[0], Eq(Num(3), Num(3)))
    m = derivation_code("mp", derivation_code("axiom", 0), derivation_code("logical", godel_encode(inst)))
    assert derive(ax, None, m) == Eq(Num(3), Num(3))
    assert derive(ax, None, derivation_code("axiom", 1)) is None
    assert derive(ax, None, derivation_code("gen", 2, derivation_code("axiom", 0))) == ForAll(2, ax[0])
    assert derive(ax, None, derivation_code("logical", godel_encode(Eq(Num(3), Num(4))))) is None
    # the axiomatic enumerator agrees with direct derivation
    t = axiomatic(ax)
    assert eval_index(t.enumerator, m, 10**5).value == godel_encode(Eq(Num(3), Num(3)))


def test_extension_emits_sentence_and_base():
    base = corpus()["zero-eq-zero"]
    psi = Eq(Num(1), Num(1))
    u = extend(base, psi)
    codes = theorem_stream(u, SearchBudget(200_000, 40, 40)).codes
    assert godel_encode(psi) in codes
    assert godel_encode(Eq(ZERO, ZERO)) in codes
    assert u.meta_flags == frozenset()


def test_proves_matches_trace_scan():
    rng = random.Random(3)
    q = corpus()["Q"]
    codes = set(theorem_stream(q, B).codes)
    pool = list(Q_AXIOMS.values()) + [Eq(Num(rng.randrange(4)), Num(rng.randrange(4))) for _ in range(40)]
    for phi in pool:
        assert isinstance(proves(q, phi, B), Yes) == (godel_encode(phi) in codes)


def test_trace_monotone_in_steps():
    q = corpus()["Q"]
    small = theorem_stream(q, SearchBudget(2_000, 40, 40)).codes
    big = theorem_stream(q, SearchBudget(40_000, 40, 40)).codes
    assert set(small) <= set(big)


def test_consistent_corpus_never_emits_bottom():
    bottom = godel_encode(BOTTOM)
    for t in corpus().values():
        if "consistent" in t.meta_flags:
            assert bottom not in theorem_stream(t, B).codes


def test_kt_domain():
    k25 = corpus()["kleene-2-5"]
    assert enumerate_domain(kT_enumerator(k25), SearchBudget(10**6, 20, 20)) == [2, 5]
    assert enumerate_domain(kT_enumerator(corpus()["empty"]), SearchBudget(20_000, 10, 10)) == []


def test_kt_sound_for_consistent_theories():
    # every n in W_kT has phi_n(n) not halting within the budget
    for t in corpus().values():
        if "consistent" not in t.meta_flags:
            continue
        for n in enumerate_domain(kT_enumerator(t), SearchBudget(200_000, 20, 20)):
            assert sigma1_truth(halt_formula(n, n), SearchBudget(10_000, 20, 20)) is not Verdict.TRUE


def test_manifest_round_trip(tmp_path):
    for t in list(corpus().values()) + [extend(corpus()["Q"], Eq(ZERO, ZERO), "Q+")]:
        again = TheorySpec.from_manifest(t.to_manifest())
        assert again == t and again.enumerator == t.enumerator
    path = tmp_path / "t.json"
    path.write_text('{"kind": "stream", "program": "HALT", "meta_flags": ["consistent"]}')
    assert load_manifest(path).stream_index == 7


def test_spec_validation():
    with pytest.raises(ValueError):
        TheorySpec("bogus")
    with pytest.raises(ValueError):
        stream("HALT", meta_flags={"not-a-flag"})
    with pytest.raises(ValueError):
        TheorySpec("extension", base=None, sentence=BOTTOM)


def test_trace_jsonl():
    text = theorem_stream(corpus()["zero-eq-zero"], B).to_jsonl()
    assert text == '{"stage": 3, "input": 0, "code": "83383801562017833", "formula": "0=0"}\n'
