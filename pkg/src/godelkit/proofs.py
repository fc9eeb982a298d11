"""A Hilbert-style calculus for Robinson arithmetic Q and generated proofs of
the pigeonhole lemma

    Q |- forall z0..zk ( /\\ z_i < k  ->  \\/_{i != j} z_i = z_j ).

Proofs are numbered line lists.  Each line carries a formula, the rule that
justifies it and, for MP/GEN, the earlier lines it uses.  Rules:

``Q1`` .. ``Q8``  the non-logical axioms below (Q8 defines <)
``TAUT``          a propositional tautology, atoms being atomic or quantified subformulas
``INST t``        forall x A -> A[t/x]           (t substitutable for x)
``EXI t``         A[t/x] -> exists x A           (t substitutable for x)
``DIST``          forall x (A -> B) -> (forall x A -> forall x B)
``VAC``           A -> forall x A                (x not free in A)
``REFL``          t = t
``SUBST``         t1 = t2 -> (A -> B)            (A atomic, B is A with some t1 replaced by t2)
``EXDEF``         exists x A <-> not forall x not A
``MP i j``        from line i (A) and line j (A -> B) infer B
``GEN i``         from line i (A) infer forall x A

Without hypotheses unrestricted generalization is sound, so open lines are
read as their universal closures.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .arith import (
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
    ZERO,
    conj,
    disj,
    free_vars,
    parse_sexpr,
    parse_term,
    subst,
    substitutable,
    succ,
    term_sexpr,
    to_sexpr,
)

PIGEONHOLE_CAP = 6

X, Y, Z = Var(1), Var(2), Var(3)

Q_AXIOMS: dict[str, Formula] = {
    "Q1": ForAll(1, Not(Eq(Succ(X), ZERO))),
    "Q2": ForAll(1, ForAll(2, Implies(Eq(Succ(X), Succ(Y)), Eq(X, Y)))),
    "Q3": ForAll(1, Or(Eq(X, ZERO), Exists(2, Eq(X, Succ(Y))))),
    "Q4": ForAll(1, Eq(Add(X, ZERO), X)),
    "Q5": ForAll(1, ForAll(2, Eq(Add(X, Succ(Y)), Succ(Add(X, Y))))),
    "Q6": ForAll(1, Eq(Mul(X, ZERO), ZERO)),
    "Q7": ForAll(1, ForAll(2, Eq(Mul(X, Succ(Y)), Add(Mul(X, Y), X)))),
    "Q8": ForAll(1, ForAll(2, Iff(Less(X, Y), Exists(3, Eq(Add(X, Succ(Z)), Y))))),
}

SCHEMAS = ("TAUT", "INST", "EXI", "DIST", "VAC", "REFL", "SUBST", "EXDEF")
RULES = tuple(Q_AXIOMS) + SCHEMAS + ("MP", "GEN")


class ProofError(ValueError):
    pass


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    rule: str
    refs: tuple[int, ...] = ()
    term: Term | None = None


@dataclass(frozen=True)
class Proof:
    lines: tuple[ProofLine, ...]

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula

    def __len__(self) -> int:
        return len(self.lines)

    def to_text(self) -> str:
        out = []
        for n, ln in enumerate(self.lines):
            args = " ".join(map(str, ln.refs))
            if ln.term is not None:
                args = term_sexpr(ln.term)
            head = f"{n}: {ln.rule}" + (f" {args}" if args else "")
            out.append(f"{head} :: {to_sexpr(ln.formula)}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Proof":
        lines = []
        for raw in text.splitlines():
            if not raw.strip():
                continue
            head, sep, body = raw.partition(" :: ")
            if not sep:
                raise ProofError(f"missing ' :: ' in {raw!r}")
            num, _, rest = head.partition(":")
            if not num.strip().isdigit() or int(num) != len(lines):
                raise ProofError(f"bad line number in {raw!r}")
            rule, _, args = rest.strip().partition(" ")
            refs: tuple[int, ...] = ()
            term = None
            if rule in ("INST", "EXI"):
                term = parse_term(args)
            elif args:
                refs = tuple(int(a) for a in args.split())
            lines.append(ProofLine(parse_sexpr(body), rule, refs, term))
        return cls(tuple(lines))


# ---------------------------------------------------------------------------
# Propositional tautology check (Tseitin encoding + DPLL)


def _dpll(clauses: list[list[int]]) -> bool:
    """Satisfiability of a CNF given as lists of nonzero ints."""
    assign: dict[int, bool] = {}

    def value(lit: int):
        v = assign.get(abs(lit))
        return None if v is None else (v if lit > 0 else not v)

    def propagate(trail: list[int]) -> bool:
        changed = True
        while changed:
            changed = False
            for cl in clauses:
                free = None
                nfree = 0
                sat = False
                for lit in cl:
                    v = value(lit)
                    if v is True:
                        sat = True
                        break
                    if v is None:
                        nfree += 1
                        free = lit
                if sat:
                    continue
                if nfree == 0:
                    return False
                if nfree == 1:
                    assign[abs(free)] = free > 0
                    trail.append(abs(free))
                    changed = True
        return True

    def solve() -> bool:
        trail: list[int] = []
        if not propagate(trail):
            for v in trail:
                del assign[v]
            return False
        var = None
        for cl in clauses:
            for lit in cl:
                if abs(lit) not in assign:
                    var = abs(lit)
                    break
            if var is not None:
                break
        if var is None:
            return True
        for choice in (True, False):
            assign[var] = choice
            if solve():
                return True
            del assign[var]
        for v in trail:
            del assign[v]
        return False

    return solve()


def is_tautology(phi: Formula) -> bool:
    atoms: dict[Formula, int] = {}
    clauses: list[list[int]] = []
    counter = itertools.count(1)
    false_var = next(counter)
    clauses.append([-false_var])

    def lit(f: Formula) -> int:
        if isinstance(f, Bottom):
            return false_var
        if isinstance(f, Not):
            return -lit(f.body)
        if isinstance(f, (And, Or, Implies, Iff)):
            a, b = lit(f.left), lit(f.right)
            g = next(counter)
            if isinstance(f, Implies):
                a = -a
            if isinstance(f, And):
                clauses.extend([[-g, a], [-g, b], [g, -a, -b]])
            elif isinstance(f, (Or, Implies)):
                clauses.extend([[-g, a, b], [g, -a], [g, -b]])
            else:
                clauses.extend([[-g, -a, b], [-g, a, -b], [g, a, b], [g, -a, -b]])
            return g
        if f not in atoms:
            atoms[f] = next(counter)
        return atoms[f]

    clauses.append([-lit(phi)])
    return not _dpll(clauses)


# ---------------------------------------------------------------------------
# Checking


def _match_instance(general: Formula, var: int, special: Formula, t: Term) -> bool:
    return substitutable(general, var, t) and subst(general, {var: t}) == special


def _shape(t: Term) -> tuple[str, tuple[Term, ...]]:
    """Head symbol and children, reading a positive numeral as s applied to its predecessor."""
    if isinstance(t, Num):
        return ("s", (Num(t.value - 1),)) if t.value else ("0", ())
    if isinstance(t, Var):
        return f"v{t.depth}", ()
    if isinstance(t, Succ):
        return "s", (t.arg,)
    return ("+" if isinstance(t, Add) else "*"), (t.left, t.right)


def _replaced(a: Term, b: Term, t1: Term, t2: Term) -> bool:
    """``b`` is ``a`` with zero or more occurrences of ``t1`` replaced by ``t2``."""
    if a == b or (a == t1 and b == t2):
        return True
    (ha, ca), (hb, cb) = _shape(a), _shape(b)
    if ha != hb or not ca:
        return False
    return all(_replaced(x, y, t1, t2) for x, y in zip(ca, cb))


def _check_subst(phi: Formula) -> bool:
    if not (isinstance(phi, Implies) and isinstance(phi.left, Eq) and isinstance(phi.right, Implies)):
        return False
    t1, t2 = phi.left.left, phi.left.right
    a, b = phi.right.left, phi.right.right
    if isinstance(a, (Eq, Less)) and type(a) is type(b):
        return _replaced(a.left, b.left, t1, t2) and _replaced(a.right, b.right, t1, t2)
    if isinstance(a, Rel) and isinstance(b, Rel) and a.name == b.name:
        return all(_replaced(x, y, t1, t2) for x, y in zip(a.args, b.args))
    return False


def check_line(lines: tuple[ProofLine, ...], n: int) -> str | None:
    """None if line ``n`` is a correct rule instance, else the reason."""
    ln = lines[n]
    phi, rule = ln.formula, ln.rule
    if rule not in RULES:
        return f"unknown rule {rule!r}"
    if rule not in ("MP", "GEN") and ln.refs:
        return "axiom lines take no references"
    if rule not in ("INST", "EXI") and ln.term is not None:
        return "unexpected term argument"
    if rule in Q_AXIOMS:
        return None if phi == Q_AXIOMS[rule] else f"not axiom {rule}"
    if rule == "TAUT":
        return None if is_tautology(phi) else "not a tautology"
    if rule == "INST":
        if isinstance(phi, Implies) and isinstance(phi.left, ForAll) and ln.term is not None:
            q = phi.left
            if _match_instance(q.body, q.var, phi.right, ln.term):
                return None
        return "bad INST"
    if rule == "EXI":
        if isinstance(phi, Implies) and isinstance(phi.right, Exists) and ln.term is not None:
            q = phi.right
            if _match_instance(q.body, q.var, phi.left, ln.term):
                return None
        return "bad EXI"
    if rule == "DIST":
        ok = (
            isinstance(phi, Implies)
            and isinstance(phi.left, ForAll)
            and isinstance(phi.left.body, Implies)
            and isinstance(phi.right, Implies)
        )
        if ok:
            v, inner = phi.left.var, phi.left.body
            if phi.right == Implies(ForAll(v, inner.left), ForAll(v, inner.right)):
                return None
        return "bad DIST"
    if rule == "VAC":
        if isinstance(phi, Implies) and isinstance(phi.right, ForAll) and phi.right.body == phi.left:
            if phi.right.var not in free_vars(phi.left):
                return None
        return "bad VAC"
    if rule == "REFL":
        return None if isinstance(phi, Eq) and phi.left == phi.right else "bad REFL"
    if rule == "SUBST":
        return None if _check_subst(phi) else "bad SUBST"
    if rule == "EXDEF":
        if isinstance(phi, Iff) and isinstance(phi.left, Exists):
            v, body = phi.left.var, phi.left.body
            if phi.right == Not(ForAll(v, Not(body))):
                return None
        return "bad EXDEF"
    if rule == "MP":
        if len(ln.refs) != 2 or not all(0 <= r < n for r in ln.refs):
            return "MP needs two earlier lines"
        a, ab = lines[ln.refs[0]].formula, lines[ln.refs[1]].formula
        return None if ab == Implies(a, phi) else "MP premises do not match"
    if len(ln.refs) != 1 or not 0 <= ln.refs[0] < n:
        return "GEN needs one earlier line"
    if isinstance(phi, ForAll) and phi.body == lines[ln.refs[0]].formula:
        return None
    return "bad GEN"


def check_proof(proof: Proof, goal: Formula | None = None) -> bool:
    """Accept iff every line is a correct rule instance (and the last line is ``goal``)."""
    if not proof.lines:
        return False
    if goal is not None and proof.conclusion != goal:
        return False
    return all(check_line(proof.lines, n) is None for n in range(len(proof.lines)))


def proof_errors(proof: Proof) -> list[tuple[int, str]]:
    errs = []
    for n in range(len(proof.lines)):
        why = check_line(proof.lines, n)
        if why is not None:
            errs.append((n, why))
    return errs


# ---------------------------------------------------------------------------
# Proof construction


class ProofBuilder:
    """Appends lines, reusing an earlier line whenever the formula repeats."""

    def __init__(self) -> None:
        self.lines: list[ProofLine] = []
        self.index: dict[Formula, int] = {}

    def f(self, i: int) -> Formula:
        return self.lines[i].formula

    def add(self, formula: Formula, rule: str, refs: tuple[int, ...] = (), term: Term | None = None) -> int:
        if formula in self.index:
            return self.index[formula]
        self.lines.append(ProofLine(formula, rule, refs, term))
        n = len(self.lines) - 1
        why = check_line(tuple(self.lines), n)
        if why is not None:
            raise ProofError(f"builder produced a bad line ({why}): {to_sexpr(formula)}")
        self.index[formula] = n
        return n

    def ax(self, name: str) -> int:
        return self.add(Q_AXIOMS[name], name)

    def taut(self, phi: Formula) -> int:
        return self.add(phi, "TAUT")

    def mp(self, i: int, j: int) -> int:
        ab = self.f(j)
        assert isinstance(ab, Implies) and ab.left == self.f(i)
        return self.add(ab.right, "MP", (i, j))

    def gen(self, i: int, var: int) -> int:
        return self.add(ForAll(var, self.f(i)), "GEN", (i,))

    def inst(self, i: int, t: Term) -> int:
        q = self.f(i)
        assert isinstance(q, ForAll)
        ax = self.add(Implies(q, subst(q.body, {q.var: t})), "INST", term=t)
        return self.mp(i, ax)

    def inst_all(self, i: int, terms: list[Term]) -> int:
        for t in terms:
            i = self.inst(i, t)
        return i

    def refl(self, t: Term) -> int:
        return self.add(Eq(t, t), "REFL")

    def subst_ax(self, t1: Term, t2: Term, a: Formula, b: Formula) -> int:
        return self.add(Implies(Eq(t1, t2), Implies(a, b)), "SUBST")

    def exi(self, body: Formula, var: int, t: Term) -> int:
        return self.add(Implies(subst(body, {var: t}), Exists(var, body)), "EXI", term=t)

    def chain(self, facts: list[int], goal: Formula) -> int:
        """Derive ``goal`` from proved ``facts`` by one tautology and MP steps."""
        phi = goal
        for i in reversed(facts):
            phi = Implies(self.f(i), phi)
        cur = self.taut(phi)
        for i in facts:
            cur = self.mp(i, cur)
        return cur

    def exists_elim(self, i: int, var: int) -> int:
        """From line ``A -> C`` (var not free in C) derive ``exists var A -> C``."""
        ac = self.f(i)
        assert isinstance(ac, Implies) and var not in free_vars(ac.right)
        a, c = ac.left, ac.right
        contra = self.chain([i], Implies(Not(c), Not(a)))
        g = self.gen(contra, var)
        dist = self.add(Implies(ForAll(var, Implies(Not(c), Not(a))), Implies(ForAll(var, Not(c)), ForAll(var, Not(a)))), "DIST")
        vac = self.add(Implies(Not(c), ForAll(var, Not(c))), "VAC")
        exdef = self.add(Iff(Exists(var, a), Not(ForAll(var, Not(a)))), "EXDEF")
        step = self.mp(g, dist)
        return self.chain([step, vac, exdef], Implies(Exists(var, a), c))

    def build(self, last: int | None = None) -> Proof:
        """Keep only lines the final line depends on, renumbered in order."""
        last = len(self.lines) - 1 if last is None else last
        used = set()
        stack = [last]
        while stack:
            n = stack.pop()
            if n in used:
                continue
            used.add(n)
            stack.extend(self.lines[n].refs)
        order = sorted(used)
        renum = {old: new for new, old in enumerate(order)}
        out = []
        for old in order:
            ln = self.lines[old]
            out.append(ProofLine(ln.formula, ln.rule, tuple(renum[r] for r in ln.refs), ln.term))
        return Proof(tuple(out))


# ---------------------------------------------------------------------------
# Lemmas and the pigeonhole principle


def pigeonhole_formula(k: int) -> Formula:
    """forall z0..zk (/\\ z_i < k -> \\/ z_i = z_j), disjuncts over ordered pairs i != j.

    z_i is the (i+1)-th variable.  For k = 0 the empty disjunction leaves
    ``forall z0 not (z0 < 0)``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    zs = [Var(i + 1) for i in range(k + 1)]
    hyp = conj(Less(z, Num(k)) for z in zs)
    if k == 0:
        body: Formula = Not(hyp)
    else:
        body = Implies(hyp, disj(Eq(zs[i], zs[j]) for i in range(k + 1) for j in range(k + 1) if i != j))
    for z in reversed(zs):
        body = ForAll(z.depth, body)
    return body


def _less_def(pb: ProofBuilder, a: Term, b: Term) -> int:
    """a < b <-> exists z (a + sz = b)."""
    return pb.inst_all(pb.ax("Q8"), [a, b])


def _lemma_not_less_zero(pb: ProofBuilder, a: Var) -> int:
    """forall a not (a < 0)."""
    z = Z
    q8 = _less_def(pb, a, ZERO)
    q5 = pb.inst_all(pb.ax("Q5"), [a, z])  # a + sz = s(a + z)
    q1 = pb.inst(pb.ax("Q1"), Add(a, z))  # not s(a + z) = 0
    sub = pb.subst_ax(Add(a, Succ(z)), Succ(Add(a, z)), Eq(Add(a, Succ(z)), ZERO), Eq(Succ(Add(a, z)), ZERO))
    each = pb.chain([q5, q1, sub], Not(Eq(Add(a, Succ(z)), ZERO)))
    every = pb.gen(each, z.depth)
    exdef = pb.add(Iff(Exists(z.depth, Eq(Add(a, Succ(z)), ZERO)), Not(ForAll(z.depth, Not(Eq(Add(a, Succ(z)), ZERO))))), "EXDEF")
    open_ = pb.chain([q8, every, exdef], Not(Less(a, ZERO)))
    return pb.gen(open_, a.depth)


LEMMA_A, LEMMA_B = Var(5), Var(6)


def _lemma_less_succ(pb: ProofBuilder) -> int:
    """forall a forall b (a < sb -> a < b or a = b)."""
    a, b, z, y = LEMMA_A, LEMMA_B, Z, Y
    goal = Or(Less(a, b), Eq(a, b))
    hyp = Eq(Add(a, Succ(z)), Succ(b))
    f1 = pb.inst_all(pb.ax("Q5"), [a, z])
    f2 = pb.subst_ax(Add(a, Succ(z)), Succ(Add(a, z)), hyp, Eq(Succ(Add(a, z)), Succ(b)))
    f3 = pb.inst_all(pb.ax("Q2"), [Add(a, z), b])
    f4 = pb.inst(pb.ax("Q3"), z)
    f5 = pb.subst_ax(z, ZERO, Eq(Add(a, z), b), Eq(Add(a, ZERO), b))
    f6 = pb.inst(pb.ax("Q4"), a)
    f7 = pb.subst_ax(Add(a, ZERO), a, Eq(Add(a, ZERO), b), Eq(a, b))
    g1 = pb.subst_ax(z, Succ(y), Eq(Add(a, z), b), Eq(Add(a, Succ(y)), b))
    g2 = pb.exi(Eq(Add(a, Succ(z)), b), z.depth, y)
    g3 = _less_def(pb, a, b)
    case_y = pb.chain([f1, f2, f3, g1, g2, g3], Implies(Eq(z, Succ(y)), Implies(hyp, goal)))
    some_y = pb.exists_elim(case_y, y.depth)
    per_z = pb.chain([f1, f2, f3, f4, f5, f6, f7, some_y], Implies(hyp, goal))
    some_z = pb.exists_elim(per_z, z.depth)
    q8 = _less_def(pb, a, Succ(b))
    open_ = pb.chain([some_z, q8], Implies(Less(a, Succ(b)), goal))
    return pb.gen(pb.gen(open_, b.depth), a.depth)


def _alpha_close(pb: ProofBuilder, i: int, temp: list[Var], final: list[Var]) -> int:
    """From forall temp (A) derive forall final (A[final/temp])."""
    open_ = pb.inst_all(i, list(final))
    for v in reversed(final):
        open_ = pb.gen(open_, v.depth)
    return open_


def _pigeonhole(pb: ProofBuilder, k: int, cache: dict[int, int]) -> int:
    if k in cache:
        return cache[k]
    if k == 0:
        cache[0] = _lemma_not_less_zero(pb, Var(1))
        return cache[0]
    prev = _pigeonhole(pb, k - 1, cache)
    step = _lemma_less_succ(pb)
    km = Num(k - 1)
    base = k + 10
    a = [Var(base + i) for i in range(k + 1)]
    facts = []
    for m in range(k + 1):
        facts.append(pb.inst_all(prev, [a[i] for i in range(k + 1) if i != m]))
    for i in range(k + 1):
        facts.append(pb.inst_all(step, [a[i], km]))
    for j in range(k + 1):
        facts.append(pb.refl(a[j]))
        facts.append(pb.subst_ax(a[j], km, Eq(a[j], a[j]), Eq(km, a[j])))
        for i in range(k + 1):
            if i != j:
                facts.append(pb.subst_ax(km, a[j], Eq(a[i], km), Eq(a[i], a[j])))
    hyp = conj(Less(v, Num(k)) for v in a)
    concl = disj(Eq(a[i], a[j]) for i in range(k + 1) for j in range(k + 1) if i != j)
    open_ = pb.chain(facts, Implies(hyp, concl))
    closed = open_
    for v in reversed(a):
        closed = pb.gen(closed, v.depth)
    cache[k] = _alpha_close(pb, closed, a, [Var(i + 1) for i in range(k + 1)])
    return cache[k]


def pigeonhole_proof(k: int, cap: int = PIGEONHOLE_CAP) -> Proof:
    """A checkable Q-proof of ``pigeonhole_formula(k)``, by induction on k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > cap:
        raise ProofError(f"k = {k} exceeds the proof-generation cap {cap}")
    pb = ProofBuilder()
    last = _pigeonhole(pb, k, {})
    proof = pb.build(last)
    if proof.conclusion != pigeonhole_formula(k):
        raise ProofError("generated proof does not end in the pigeonhole formula")
    return proof


# ---------------------------------------------------------------------------
# Mutation fuzzing


def _mutate_term(t: Term, rng: random.Random) -> Term:
    choice = rng.randrange(3)
    if choice == 0:
        return succ(t)
    if choice == 1:
        return Add(t, ZERO)
    return Var(rng.randrange(1, 30)) if not isinstance(t, Var) else Var(t.depth + 1)


def mutate_formula(phi: Formula, rng: random.Random) -> Formula:
    """A formula differing from ``phi`` in one node."""
    nodes: list[tuple[str, Formula]] = []

    def walk(f: Formula, path: tuple) -> None:
        nodes.append((path, f))
        if isinstance(f, Not):
            walk(f.body, path + ("body",))
        elif isinstance(f, (And, Or, Implies, Iff)):
            walk(f.left, path + ("left",))
            walk(f.right, path + ("right",))
        elif isinstance(f, (ForAll, Exists)):
            walk(f.body, path + ("body",))

    walk(phi, ())
    path, target = rng.choice(nodes)
    options = [Not(target)]
    if isinstance(target, (Eq, Less)):
        options.append(type(target)(_mutate_term(target.left, rng), target.right))
        options.append(Less(target.left, target.right) if isinstance(target, Eq) else Eq(target.left, target.right))
    if isinstance(target, (And, Or, Implies, Iff)):
        others = [c for c in (And, Or, Implies, Iff) if c is not type(target)]
        options.append(rng.choice(others)(target.left, target.right))
    if isinstance(target, (ForAll, Exists)):
        options.append((Exists if isinstance(target, ForAll) else ForAll)(target.var, target.body))
    new = rng.choice(options)

    def rebuild(f: Formula, path: tuple) -> Formula:
        if not path:
            return new
        head, rest = path[0], path[1:]
        if isinstance(f, Not):
            return Not(rebuild(f.body, rest))
        if isinstance(f, (ForAll, Exists)):
            return type(f)(f.var, rebuild(f.body, rest))
        if head == "left":
            return type(f)(rebuild(f.left, rest), f.right)
        return type(f)(f.left, rebuild(f.right, rest))

    out = rebuild(phi, path)
    return out if out != phi else Not(phi)


def mutate_proof(proof: Proof, rng: random.Random) -> Proof:
    """Change exactly one line: its formula, its rule or one of its references."""
    lines = list(proof.lines)
    n = rng.randrange(len(lines))
    ln = lines[n]
    kind = rng.choice(("formula", "rule", "refs") if ln.refs else ("formula", "rule"))
    if kind == "formula":
        new = ProofLine(mutate_formula(ln.formula, rng), ln.rule, ln.refs, ln.term)
    elif kind == "rule":
        rule = rng.choice([r for r in RULES if r != ln.rule])
        new = ProofLine(ln.formula, rule, ln.refs, ln.term)
    else:
        refs = list(ln.refs)
        p = rng.randrange(len(refs))
        choices = [r for r in range(n) if r != refs[p]]
        if not choices:
            refs.reverse()
        else:
            refs[p] = rng.choice(choices)
        new = ProofLine(ln.formula, ln.rule, tuple(refs), ln.term)
    lines[n] = new
    return Proof(tuple(lines))


# ---------------------------------------------------------------------------
# Logical axioms without an explicit instance term (used by theory enumerators)


def _infer_term(general, special, var: int, found: dict) -> bool:
    if isinstance(general, (Num, Var, Succ, Add, Mul)):
        if general == Var(var):
            if "t" in found:
                return found["t"] == special
            found["t"] = special
            return True
        (hg, cg), (hs, cs) = _shape(general), _shape(special)
        if hg != hs:
            return False
        return all(_infer_term(a, b, var, found) for a, b in zip(cg, cs))
    if type(general) is not type(special):
        return False
    if isinstance(general, Rel):
        return general.name == special.name and all(
            _infer_term(a, b, var, found) for a, b in zip(general.args, special.args)
        )
    if isinstance(general, (Eq, Less, And, Or, Implies, Iff)):
        return _infer_term(general.left, special.left, var, found) and _infer_term(
            general.right, special.right, var, found
        )
    if isinstance(general, Not):
        return _infer_term(general.body, special.body, var, found)
    if isinstance(general, (ForAll, Exists)):
        if general.var != special.var:
            return False
        if general.var == var:
            return general == special
        return _infer_term(general.body, special.body, var, found)
    return general == special


def instance_term(general: Formula, var: int, special: Formula) -> Term | None:
    """A term ``t`` with ``special == general[t/var]``, if there is one."""
    found: dict = {}
    if not _infer_term(general, special, var, found):
        return None
    t = found.get("t", Var(var))
    return t if _match_instance(general, var, special, t) else None


def logical_rule(phi: Formula) -> str | None:
    """Name of a logical axiom schema ``phi`` instantiates, if any."""
    if isinstance(phi, Implies) and isinstance(phi.left, ForAll):
        if instance_term(phi.left.body, phi.left.var, phi.right) is not None:
            return "INST"
    if isinstance(phi, Implies) and isinstance(phi.right, Exists):
        if instance_term(phi.right.body, phi.right.var, phi.left) is not None:
            return "EXI"
    for rule in ("DIST", "VAC", "REFL", "SUBST", "EXDEF"):
        if check_line((ProofLine(phi, rule),), 0) is None:
            return rule
    return "TAUT" if is_tautology(phi) else None
