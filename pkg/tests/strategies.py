"""Hypothesis strategies for terms and formulas."""

from hypothesis import strategies as st

from godelkit.arith import (
    Add, And, Bottom, Eq, Exists, ForAll, Iff, Implies, Less, Mul, Not, Num, Or, Rel, Var, succ,
)

terms = st.recursive(
    st.one_of(st.integers(0, 40).map(Num), st.integers(1, 4).map(Var)),
    lambda t: st.one_of(
        t.map(succ),
        st.builds(Add, t, t),
        st.builds(Mul, t, t),
    ),
    max_leaves=5,
)

atoms = st.one_of(
    st.builds(Eq, terms, terms),
    st.builds(Less, terms, terms),
    st.builds(lambda a, b: Rel("Len", (a, b)), terms, terms),
    st.just(Bottom()),
)

formulas = st.recursive(
    atoms,
    lambda f: st.one_of(
        f.map(Not),
        st.builds(And, f, f),
        st.builds(Or, f, f),
        st.builds(Implies, f, f),
        st.builds(Iff, f, f),
        st.builds(ForAll, st.integers(1, 4), f),
        st.builds(Exists, st.integers(1, 4), f),
    ),
    max_leaves=6,
)
