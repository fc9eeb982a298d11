import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from godelkit.arith import And, Eq, ForAll, Iff, Implies, Less, Not, Num, Or, Var, free_vars, length
from godelkit.proofs import (
    PIGEONHOLE_CAP, Proof, ProofBuilder, ProofError, ProofLine, Q_AXIOMS,
    check_proof, instance_term, is_tautology, logical_rule, mutate_proof, pigeonhole_formula,
    pigeonhole_proof, proof_errors,
)

ATOMS = [Eq(Var(i), Num(0)) for i in (1, 2, 3)]

props = st.recursive(
    st.sampled_from(ATOMS),
    lambda f: st.one_of(
        f.map(Not),
        st.builds(And, f, f),
        st.builds(Or, f, f),
        st.builds(Implies, f, f),
        st.builds(Iff, f, f),
    ),
    max_leaves=8,
)


def truth_table(phi):
    """Oracle: evaluate under all 8 assignments of the three atoms."""

    def ev(f, a):
        if f in ATOMS:
            return a[ATOMS.index(f)]
        if isinstance(f, Not):
            return not ev(f.body, a)
        l, r = ev(f.left, a), ev(f.right, a)
        return {And: l and r, Or: l or r, Implies: (not l) or r, Iff: l == r}[type(f)]

    return all(ev(phi, a) for a in itertools.product([False, True], repeat=3))


@given(props)
def test_tautology_checker_matches_truth_table(phi):
    assert is_tautology(phi) == truth_table(phi)


def test_tautology_treats_quantified_parts_as_atoms():
    q = ForAll(1, Eq(Var(1), Var(1)))
    assert is_tautology(Or(q, Not(q)))
    assert not is_tautology(q)


def test_pigeonhole_formula_shape():
    assert pigeonhole_formula(0) == ForAll(1, Not(Less(Var(1), Num(0))))
    for k in range(5):
        phi = pigeonhole_formula(k)
        assert free_vars(phi) == set()


@pytest.mark.parametrize("k", range(5))
def test_pigeonhole_proofs_check(k):
    proof = pigeonhole_proof(k)
    goal = pigeonhole_formula(k)
    assert check_proof(proof, goal)
    assert proof_errors(proof) == []
    assert check_proof(Proof.from_text(proof.to_text()), goal)
    assert not check_proof(proof, pigeonhole_formula(k + 1))


def test_pigeonhole_sizes_frozen():
    assert [len(pigeonhole_proof(k)) for k in range(5)] == [25, 131, 193, 286, 416]


def test_pigeonhole_cap():
    with pytest.raises(ProofError):
        pigeonhole_proof(PIGEONHOLE_CAP + 1)
    with pytest.raises(ProofError):
        pigeonhole_proof(3, cap=2)


@pytest.mark.parametrize("k", range(3))
def test_mutations_rejected(k):
    proof = pigeonhole_proof(k)
    goal = pigeonhole_formula(k)
    rng = random.Random(k)
    assert all(not check_proof(mutate_proof(proof, rng), goal) for _ in range(100))


def test_basic_rules():
    pb = ProofBuilder()
    q1 = pb.ax("Q1")
    inst = pb.inst(q1, Num(0))
    assert pb.f(inst) == Not(Eq(Num(1), Num(0)))
    proof = pb.build()
    assert check_proof(proof, Not(Eq(Num(1), Num(0))))


def test_bad_lines_reported():
    bad = Proof((ProofLine(Eq(Num(0), Num(1)), "REFL"),))
    assert not check_proof(bad)
    assert proof_errors(bad)
    wrong_axiom = Proof((ProofLine(Q_AXIOMS["Q2"], "Q1"),))
    assert not check_proof(wrong_axiom)
    forward_ref = Proof((ProofLine(Q_AXIOMS["Q1"], "MP", (0, 1)),))
    assert not check_proof(forward_ref)


def test_from_text_rejects_garbage():
    with pytest.raises(ProofError):
        Proof.from_text("0: TAUT (= 0 0)")
    with pytest.raises(ProofError):
        Proof.from_text("3: TAUT :: (= 0 0)")


def test_logical_rule_and_instance_term():
    general = Eq(Var(1), Var(1))
    assert instance_term(general, 1, Eq(Num(4), Num(4))) == Num(4)
    assert instance_term(general, 1, Eq(Num(4), Num(5))) is None
    assert logical_rule(Implies(ForAll(1, general), Eq(Num(2), Num(2)))) == "INST"
    assert logical_rule(Or(ATOMS[0], Not(ATOMS[0]))) == "TAUT"
    assert logical_rule(ATOMS[0]) is None
