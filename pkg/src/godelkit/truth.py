"""Bounded three-valued truth of arithmetic sentences in the standard model.

Quantifiers of the shape ``exists v (G and ...)`` / ``forall v (G -> ...)``
are bounded when the guard ``G`` is ``v < t``, ``v = t`` or a functional
relation whose output slot is ``v``; those are scanned exactly (up to
``enumeration_limit`` values).  Other quantifiers are unbounded and searched
over a finite witness pool, so they can only confirm (exists) or refute
(forall).  ``exists c Halts(i, j, c)`` and ``exists c Out(i, j, c, v)`` are
resolved by running ``phi_i(j)`` for ``step_limit`` steps.

Every definite verdict is correct in the standard model, so more budget can
turn UNKNOWN into a definite answer but never flip TRUE and FALSE.
"""

from __future__ import annotations

import enum
from functools import lru_cache

from .arith import (
    BINARY,
    FUNCTIONAL_OUTPUT,
    Add,
    And,
    Bottom,
    Eq,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Less,
    Mul,
    Not,
    Num,
    Or,
    Rel,
    Succ,
    Term,
    Var,
    free_vars,
    relation_output,
    term_vars,
)
from .machine import Halted, SearchBudget, eval_index, statically_diverges


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __invert__(self) -> "Verdict":
        return _NEG[self]

    @property
    def definite(self) -> bool:
        return self is not Verdict.UNKNOWN


T, F, U = Verdict.TRUE, Verdict.FALSE, Verdict.UNKNOWN
_NEG = {T: F, F: T, U: U}


class FragmentError(ValueError):
    """The sentence is outside the Delta0 / Sigma1 / Pi1 fragment."""


def _and(a: Verdict, b: Verdict) -> Verdict:
    if a is F or b is F:
        return F
    return T if a is T and b is T else U


def _or(a: Verdict, b: Verdict) -> Verdict:
    if a is T or b is T:
        return T
    return F if a is F and b is F else U


# ---------------------------------------------------------------------------
# Classification


def _guard_var_ok(guard: Formula, v: int) -> bool:
    if isinstance(guard, Less):
        return guard.left == Var(v) and v not in term_vars(guard.right)
    if isinstance(guard, Eq):
        if guard.left == Var(v):
            return v not in term_vars(guard.right)
        return guard.right == Var(v) and v not in term_vars(guard.left)
    if isinstance(guard, Rel) and guard.name in FUNCTIONAL_OUTPUT:
        k = FUNCTIONAL_OUTPUT[guard.name]
        others = [a for n, a in enumerate(guard.args) if n != k]
        return guard.args[k] == Var(v) and all(v not in term_vars(a) for a in others)
    return False


def split_guard(phi: Formula) -> tuple[Formula, Formula | None] | None:
    """``(guard, rest)`` if ``phi`` is a bounded quantifier, else None."""
    if isinstance(phi, Exists):
        body = phi.body
        if _guard_var_ok(body, phi.var):
            return body, None
        if isinstance(body, And) and _guard_var_ok(body.left, phi.var):
            return body.left, body.right
    if isinstance(phi, ForAll):
        body = phi.body
        if isinstance(body, Implies) and _guard_var_ok(body.left, phi.var):
            return body.left, body.right
    return None


def _halting_block(phi: Formula) -> bool:
    """``exists c Halts(i, j, c)`` or ``exists c Out(i, j, c, v)`` with c only in the step slot."""
    if not isinstance(phi, Exists) or not isinstance(phi.body, Rel):
        return False
    rel = phi.body
    if rel.name not in ("Halts", "Out") or rel.args[2] != Var(phi.var):
        return False
    return all(phi.var not in term_vars(a) for n, a in enumerate(rel.args) if n != 2)


def _unbounded_kinds(phi: Formula, positive: bool, acc: set[str]) -> None:
    if isinstance(phi, (Eq, Less, Rel, Bottom)):
        return
    if isinstance(phi, Not):
        _unbounded_kinds(phi.body, not positive, acc)
        return
    if isinstance(phi, Implies):
        _unbounded_kinds(phi.left, not positive, acc)
        _unbounded_kinds(phi.right, positive, acc)
        return
    if isinstance(phi, Iff):
        for side in (phi.left, phi.right):
            _unbounded_kinds(side, positive, acc)
            _unbounded_kinds(side, not positive, acc)
        return
    if isinstance(phi, BINARY):
        _unbounded_kinds(phi.left, positive, acc)
        _unbounded_kinds(phi.right, positive, acc)
        return
    bounded = split_guard(phi)
    if bounded is not None:
        guard, rest = bounded
        _unbounded_kinds(guard, positive if isinstance(phi, Exists) else not positive, acc)
        if rest is not None:
            _unbounded_kinds(rest, positive, acc)
        return
    existential = isinstance(phi, Exists) == positive
    acc.add("E" if existential else "A")
    _unbounded_kinds(phi.body, positive, acc)


def classify(phi: Formula) -> str:
    """One of ``"Delta0"``, ``"Sigma1"``, ``"Pi1"``; raises FragmentError otherwise."""
    if free_vars(phi):
        raise FragmentError(f"not a sentence: free variables {sorted(free_vars(phi))}")
    kinds: set[str] = set()
    _unbounded_kinds(phi, True, kinds)
    if not kinds:
        return "Delta0"
    if kinds == {"E"}:
        return "Sigma1"
    if kinds == {"A"}:
        return "Pi1"
    raise FragmentError("mixes unbounded existential and universal quantifiers")


# ---------------------------------------------------------------------------
# Evaluation


@lru_cache(maxsize=65536)
def _run(i: int, j: int, steps: int):
    return eval_index(i, j, steps)


def term_value(t: Term, env: dict[int, int]) -> int:
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        return env[t.depth]
    if isinstance(t, Succ):
        return term_value(t.arg, env) + 1
    if isinstance(t, Add):
        return term_value(t.left, env) + term_value(t.right, env)
    if isinstance(t, Mul):
        return term_value(t.left, env) * term_value(t.right, env)
    raise TypeError(t)


def _numerals(phi, acc: set[int]) -> None:
    if isinstance(phi, Num):
        acc.add(phi.value)
    elif isinstance(phi, (Var, Bottom)):
        pass
    elif isinstance(phi, Succ):
        _numerals(phi.arg, acc)
    elif isinstance(phi, Rel):
        for a in phi.args:
            _numerals(a, acc)
    elif isinstance(phi, Not):
        _numerals(phi.body, acc)
    elif isinstance(phi, (ForAll, Exists)):
        _numerals(phi.body, acc)
    else:
        _numerals(phi.left, acc)
        _numerals(phi.right, acc)


class _Evaluator:
    def __init__(self, budget: SearchBudget, pool_seed: set[int]):
        self.budget = budget
        base = set(range(budget.index_limit + 1)) | {budget.step_limit}
        base |= pool_seed | {v + 1 for v in pool_seed}
        self.pool_seed = base

    def atom_rel(self, rel: Rel, env: dict[int, int]) -> Verdict:
        args = [term_value(a, env) for a in rel.args]
        if rel.name in ("Halts", "Out"):
            i, j, c = args[0], args[1], args[2]
            out = _run(i, j, min(c, self.budget.step_limit))
            if isinstance(out, Halted):
                if out.steps > c:
                    return F
                return T if rel.name == "Halts" or out.value == args[3] else F
            return F if c <= self.budget.step_limit or statically_diverges(i) else U
        k = FUNCTIONAL_OUTPUT[rel.name]
        want = relation_output(rel.name, tuple(a for n, a in enumerate(args) if n != k))
        return T if want == args[k] else F

    def halting_block(self, phi: Exists, env: dict[int, int]) -> Verdict:
        rel = phi.body
        args = [None if n == 2 else term_value(a, env) for n, a in enumerate(rel.args)]
        i, j = args[0], args[1]
        out = _run(i, j, self.budget.step_limit)
        if isinstance(out, Halted):
            return T if rel.name == "Halts" or out.value == args[3] else F
        return F if statically_diverges(i) else U

    def guard_values(self, guard: Formula, v: int, env: dict[int, int]):
        """Candidate values for the guarded variable and whether they are exhaustive."""
        if isinstance(guard, Less):
            bound = term_value(guard.right, env)
            limit = self.budget.enumeration_limit
            return range(min(bound, limit)), bound <= limit
        if isinstance(guard, Eq):
            other = guard.right if guard.left == Var(v) else guard.left
            return [term_value(other, env)], True
        k = FUNCTIONAL_OUTPUT[guard.name]
        inputs = tuple(term_value(a, env) for n, a in enumerate(guard.args) if n != k)
        out = relation_output(guard.name, inputs)
        return ([] if out is None else [out]), True

    def ev(self, phi: Formula, env: dict[int, int]) -> Verdict:
        if isinstance(phi, Eq):
            return T if term_value(phi.left, env) == term_value(phi.right, env) else F
        if isinstance(phi, Less):
            return T if term_value(phi.left, env) < term_value(phi.right, env) else F
        if isinstance(phi, Rel):
            return self.atom_rel(phi, env)
        if isinstance(phi, Bottom):
            return F
        if isinstance(phi, Not):
            return ~self.ev(phi.body, env)
        if isinstance(phi, And):
            a = self.ev(phi.left, env)
            return F if a is F else _and(a, self.ev(phi.right, env))
        if isinstance(phi, Or):
            a = self.ev(phi.left, env)
            return T if a is T else _or(a, self.ev(phi.right, env))
        if isinstance(phi, Implies):
            a = self.ev(phi.left, env)
            return T if a is F else _or(~a, self.ev(phi.right, env))
        if isinstance(phi, Iff):
            a, b = self.ev(phi.left, env), self.ev(phi.right, env)
            if U in (a, b):
                return U
            return T if a is b else F
        if _halting_block(phi):
            return self.halting_block(phi, env)
        return self.quantifier(phi, env)

    def quantifier(self, phi: Exists | ForAll, env: dict[int, int]) -> Verdict:
        existential = isinstance(phi, Exists)
        bounded = split_guard(phi)
        if bounded is not None:
            guard, rest = bounded
            values, exhaustive = self.guard_values(guard, phi.var, env)
        else:
            guard, rest = None, phi.body
            values, exhaustive = sorted(self.pool_seed | set(env.values())), False
        result = F if existential else T
        for val in values:
            inner = dict(env)
            inner[phi.var] = val
            v = T if rest is None else self.ev(rest, inner)
            if existential:
                if v is T:
                    return T
                if v is U:
                    result = U
            else:
                if v is F:
                    return F
                if v is U:
                    result = U
        if not exhaustive:
            return U
        return result


def sigma1_truth(phi: Formula, budget: SearchBudget | None = None) -> Verdict:
    """Evaluate a Delta0, Sigma1 or Pi1 sentence in the standard model.

    Delta0 sentences are decided exactly when their bounds fit in the
    budget.  Sigma1 sentences come back TRUE once a witness is found, Pi1
    sentences FALSE once a counterexample is found; otherwise UNKNOWN.
    """
    budget = budget or SearchBudget()
    classify(phi)
    seed: set[int] = set()
    _numerals(phi, seed)
    return _Evaluator(budget, seed).ev(phi, {})
