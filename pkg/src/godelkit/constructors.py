"""The incompleteness constructions, each returning a replayable certificate.

Every certificate records the theory manifest, the search budget and the
construction's parameters, so ``replay`` can rebuild it from scratch and
compare the canonical JSON byte for byte.  Evidence gathered under a budget
is labelled as such: unbounded claims (consistency, divergence, true
complexity) are out of reach of any finite search.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import arith
from .arith import (
    And,
    Exists,
    Formula,
    Mul,
    Not,
    Num,
    Rel,
    Var,
    free_vars,
    fresh_var,
    godel_decode,
    godel_encode,
    length,
    subst,
    to_sexpr,
)
from .machine import (
    CODING_VERSION,
    Halted,
    SearchBudget,
    curry_transformer,
    enumerate_domain,
    eval_index,
    index_of,
    k_upper,
    self_applying,
    smn,
    statically_diverges,
)
from .theory import (
    TheorySpec,
    Yes,
    extend,
    kT_enumerator,
    proves,
    theorem_stream,
)
from .truth import Verdict, sigma1_truth

CERT_VERSION = "godelkit-cert-1"
TOWER_CAP = 4


class ConstructionError(RuntimeError):
    pass


def _big(n: int | None) -> str | None:
    return None if n is None else str(n)


def _header(kind: str, theory: TheorySpec, budget: SearchBudget | None, params: dict | None = None) -> dict:
    return {
        "kind": kind,
        "version": CERT_VERSION,
        "coding": CODING_VERSION,
        "theory": theory.to_manifest(),
        "budget": None if budget is None else budget.to_json(),
        "params": params or {},
    }


# ---------------------------------------------------------------------------
# Kleene: a true unprovable "phi_t(t) diverges"


@dataclass(frozen=True)
class KleeneCertificate:
    t: int
    theory: TheorySpec
    unprovable_sentence: Formula
    nonhalt_evidence_budget: SearchBudget
    run_exhausted: bool
    sentence_in_trace: bool
    domain_prefix: tuple[int, ...]

    def to_json(self) -> dict:
        out = _header("kleene", self.theory, self.nonhalt_evidence_budget)
        out["result"] = {
            "t": str(self.t),
            "unprovable_sentence": to_sexpr(self.unprovable_sentence),
            "run_exhausted": self.run_exhausted,
            "sentence_in_trace": self.sentence_in_trace,
            "domain_prefix": list(self.domain_prefix),
        }
        return out


def kleene_index(theory: TheorySpec, budget: SearchBudget | None = None) -> KleeneCertificate:
    """t = index of K_T = {n : T proves "phi_n(n) diverges"}.

    For a consistent, Sigma1-sound theory t is not in W_t and T does not prove
    "phi_t(t) diverges".  The certificate records bounded evidence of both.
    """
    budget = budget or SearchBudget()
    t = kT_enumerator(theory)
    sentence = arith.nonhalt_formula(t, t)
    run = eval_index(t, t, budget)
    in_trace = isinstance(proves(theory, sentence, budget), Yes)
    domain = tuple(sorted(enumerate_domain(t, budget)))
    return KleeneCertificate(t, theory, sentence, budget, not isinstance(run, Halted), in_trace, domain)


# ---------------------------------------------------------------------------
# Diagonal lemma


def diagonal_sentence(template: Formula) -> Formula:
    """lambda with lambda <-> template(code of lambda), by diagonalization.

    With psi(y) = exists w (Diag(y, w) and theta(w)), lambda is psi applied
    to the numeral of psi's own code; Diag then forces w = code(lambda).
    """
    fv = free_vars(template)
    if len(fv) != 1:
        raise ValueError(f"template must have exactly one free variable, has {sorted(fv)}")
    (v,) = fv
    w = fresh_var(template)
    y = w + 1
    theta = subst(template, {v: Var(w)})
    psi = Exists(w, And(Rel("Diag", (Var(y), Var(w))), theta))
    return subst(psi, {y: Num(godel_encode(psi))})


def apply_template(template: Formula, n: int) -> Formula:
    (v,) = free_vars(template)
    return subst(template, {v: Num(n)})


@dataclass(frozen=True)
class DiagonalCheck:
    sentence: Formula
    lam_verdict: Verdict
    instance_verdict: Verdict

    @property
    def agree(self) -> bool:
        return self.lam_verdict is self.instance_verdict


def check_diagonal(template: Formula, budget: SearchBudget) -> DiagonalCheck:
    lam = diagonal_sentence(template)
    inst = apply_template(template, godel_encode(lam))
    return DiagonalCheck(lam, sigma1_truth(lam, budget), sigma1_truth(inst, budget))


# ---------------------------------------------------------------------------
# Non-Rosser extension: U = T + lambda with lambda <-> "phi_u(u) halts"

_HBAR = """
    PRIM FST 9 0 0
    PRIM SND 10 0 0
    SET 11 {enum}
    PRIM EXTENUM 7 11 9
    PRIM NHALT 1 10 10
    INC 1
    SET 2 0
    SET 8 2
search:
    PRIM FST 3 2 2
    PRIM SND 4 2 2
    PRIM POW 4 8 4
    RUN 5 7 3 4
    JEQ 5 1 found
    INC 2
    JMP search
found:
    HALT
"""


def hbar_program(theory: TheorySpec) -> int:
    """Binary program ``pair(code psi, n)`` that halts iff T + psi proves "phi_n(n) diverges"."""
    return index_of(_HBAR.format(enum=theory.enumerator))


def hbar(theory: TheorySpec, psi: Formula) -> int:
    """The total map psi -> index of K_{T+psi}, as an s-m-n instance."""
    return smn(hbar_program(theory), godel_encode(psi))


def hbar_halts_template(theory: TheorySpec) -> Formula:
    """theta(x) = exists u (Smn(HB, x, u) and exists c Halts(u, u, c))."""
    hb = Num(hbar_program(theory))
    return Exists(2, And(Rel("Smn", (hb, Var(1), Var(2))), Exists(3, Rel("Halts", (Var(2), Var(2), Var(3))))))


@dataclass(frozen=True)
class NonRosserCertificate:
    theory: TheorySpec
    extension: TheorySpec
    u: int
    sentence: Formula
    budget: SearchBudget
    sample: int
    sentence_stage: int | None
    lam_verdict: Verdict
    halt_verdict: Verdict
    domain_sample: tuple[int, ...]
    trace_sample: tuple[int, ...]

    @property
    def agrees(self) -> bool:
        return self.domain_sample == self.trace_sample

    def to_json(self) -> dict:
        out = _header("nonrosser", self.theory, self.budget, {"sample": self.sample})
        out["result"] = {
            "u": str(self.u),
            "sentence": to_sexpr(self.sentence),
            "sentence_stage": self.sentence_stage,
            "lambda_verdict": self.lam_verdict.value,
            "halt_verdict": self.halt_verdict.value,
            "domain_sample": list(self.domain_sample),
            "trace_sample": list(self.trace_sample),
        }
        return out


def nonrosser_extension(theory: TheorySpec, budget: SearchBudget | None = None, sample: int = 50) -> NonRosserCertificate:
    """U = T + lambda where lambda says "phi_{hbar(lambda)}(hbar(lambda)) halts"."""
    budget = budget or SearchBudget()
    lam = diagonal_sentence(hbar_halts_template(theory))
    u = hbar(theory, lam)
    ext = extend(theory, lam, name=f"{theory.name}+lambda")
    found = proves(ext, lam, budget)
    sample_budget = SearchBudget(budget.step_limit, min(sample, budget.index_limit), budget.enumeration_limit)
    domain = tuple(sorted(n for n in enumerate_domain(u, sample_budget) if n <= sample))
    emitted = set(theorem_stream(ext, budget).codes)
    trace = tuple(n for n in range(sample + 1) if godel_encode(arith.nonhalt_formula(n, n)) in emitted)
    return NonRosserCertificate(
        theory,
        ext,
        u,
        lam,
        budget,
        sample,
        found.stage if isinstance(found, Yes) else None,
        sigma1_truth(lam, budget),
        sigma1_truth(arith.halt_formula(u, u), budget),
        domain,
        trace,
    )


# ---------------------------------------------------------------------------
# Chaitin: the constant c_T beyond which T proves no "K(w) > e"

_SEARCHER = """
    PRIM FST 1 0 0
    SET 2 0
    SET 7 {enum}
    SET 8 2
    SET 11 0
search:
    PRIM FST 3 2 2
    PRIM SND 4 2 2
    PRIM POW 4 8 4
    RUN 5 7 3 4
    DECJZ 5 next
    PRIM KGTPARSE 6 5 5
    DECJZ 6 next
    PRIM SND 9 6 6
    PRIM MONUS 10 1 9
    JEQ 10 11 found
next:
    INC 2
    JMP search
found:
    PRIM FST 0 6 6
    HALT
"""


def chaitin_searcher(theory: TheorySpec) -> int:
    """Binary program: on pair(x, y), the first theorem "K(a) > b" with b >= x, output a.

    "First" is the order of the search s = pair(k, j): enumerator input k
    run for 2**j steps.
    """
    return index_of(_SEARCHER.format(enum=theory.enumerator))


def k_claims(theory: TheorySpec, budget: SearchBudget) -> list[tuple[int, int]]:
    """Sentences "K(w) > e" in the bounded theorem trace, as (w, e)."""
    out = []
    for code in theorem_stream(theory, budget).codes:
        parsed = arith.parse_k_greater(code)
        if parsed is not None:
            out.append(parsed)
    return out


@dataclass(frozen=True)
class ChaitinCertificate:
    c: int
    theory: TheorySpec
    recursion_trace: dict
    budget: SearchBudget
    claims_at_or_above_c: tuple[tuple[int, int], ...]
    run_on_zero: int | None

    @property
    def evidence_holds(self) -> bool:
        return not self.claims_at_or_above_c

    def to_json(self) -> dict:
        out = _header("chaitin", self.theory, self.budget)
        out["result"] = {
            "c": str(self.c),
            "recursion_trace": {k: str(v) for k, v in self.recursion_trace.items()},
            "claims_at_or_above_c": [[str(w), str(e)] for w, e in self.claims_at_or_above_c],
            "run_on_zero": _big(self.run_on_zero),
        }
        return out


def chaitin_constant(theory: TheorySpec, budget: SearchBudget | None = None) -> ChaitinCertificate:
    """c_T with phi_c(y) = searcher(c, y).

    If T proved some "K(a) > b" with b >= c_T, then phi_c(0) = a, so
    K(a) <= c_T: T would prove a false Sigma1-refutable sentence.
    """
    budget = budget or SearchBudget()
    h = chaitin_searcher(theory)
    c = self_applying(h)
    claims = tuple((w, e) for w, e in k_claims(theory, budget) if e >= c)
    run = eval_index(c, 0, budget)
    trace = {"searcher": h, "transformer": curry_transformer(h), "fixed_point": c}
    return ChaitinCertificate(c, theory, trace, budget, claims, run.value if isinstance(run, Halted) else None)


@dataclass(frozen=True)
class ChaitinWitness:
    w: int
    c: int
    scanned_upto: int
    unresolved: tuple[int, ...]

    @property
    def complete(self) -> bool:
        """True when every index <= c was scanned and resolved, making K(w) > c exact."""
        return self.scanned_upto >= self.c and not self.unresolved


def chaitin_witness_report(theory: TheorySpec | None, c: int, budget: SearchBudget) -> ChaitinWitness:
    """Least w not output on 0 by any index <= c within the budget.

    K(w) > c is then certain only if every index <= c that ever halts on 0
    does so within step_limit (``complete``); otherwise it is budget-relative.
    """
    last = min(c, budget.index_limit)
    outputs = set()
    unresolved = []
    for i in range(last + 1):
        out = eval_index(i, 0, budget)
        if isinstance(out, Halted):
            outputs.add(out.value)
        elif not statically_diverges(i):
            unresolved.append(i)
    w = 0
    while w in outputs:
        w += 1
    return ChaitinWitness(w, c, last, tuple(unresolved))


def chaitin_witness(theory: TheorySpec | None, c: int, budget: SearchBudget) -> int:
    return chaitin_witness_report(theory, c, budget).w


# ---------------------------------------------------------------------------
# Boolos: the Berry sentence and its length bound


@dataclass(frozen=True)
class BoolosBundle:
    def_f: Formula
    berry_f: Formula
    boolos_f: Formula
    ell: int
    bound: int
    theory: TheorySpec

    @property
    def boolos_len(self) -> int:
        return length(self.boolos_f)

    @property
    def holds(self) -> bool:
        return self.boolos_len < self.bound and self.bound == 5 * self.ell

    def to_json(self) -> dict:
        out = _header("boolos", self.theory, None)
        out["result"] = {
            "ell": str(self.ell),
            "bound": str(self.bound),
            "boolos_len": str(self.boolos_len),
            "def": to_sexpr(self.def_f),
            "berry": to_sexpr(self.berry_f),
            "boolos": to_sexpr(self.boolos_f),
        }
        return out


def boolos_bundle(theory: TheorySpec) -> BoolosBundle:
    berry = arith.berry_template(theory)
    ell = length(berry)
    bundle = BoolosBundle(
        arith.def_formula(theory, Var(2), Var(1)),
        berry,
        arith.boolos_formula(theory),
        ell,
        5 * ell,
        theory,
    )
    if not bundle.holds:
        raise ConstructionError(f"length bound failed: {bundle.boolos_len} >= {bundle.bound}")
    return bundle


def boolos_sentence(theory: TheorySpec, b: int) -> Formula:
    """Boolos_T(b), the sentence true and unprovable for b = b_T."""
    return subst(arith.boolos_formula(theory), {1: Num(b)})


def _defining_formula(phi: Formula) -> tuple[Formula, int] | None:
    """(theta, y) if phi has the shape forall x [theta <-> x = y] with only x free in theta."""
    if not (isinstance(phi, arith.ForAll) and phi.var == 1 and isinstance(phi.body, arith.Iff)):
        return None
    theta, rhs = phi.body.left, phi.body.right
    if rhs.__class__ is not arith.Eq or rhs.left != Var(1) or not isinstance(rhs.right, Num):
        return None
    if not free_vars(theta) <= {1}:
        return None
    return theta, rhs.right.value


@dataclass(frozen=True)
class BerryEstimate:
    b_hat: int
    budget: SearchBudget
    bound: int
    definability_witnesses: dict[int, Formula]
    candidate_cap: int
    theory: TheorySpec

    def to_json(self) -> dict:
        out = _header("berry", self.theory, self.budget)
        out["result"] = {
            "b_hat": str(self.b_hat),
            "bound": str(self.bound),
            "candidate_cap": self.candidate_cap,
            "witnesses": {str(y): to_sexpr(f) for y, f in sorted(self.definability_witnesses.items())},
        }
        return out


def berry_estimate(theory: TheorySpec, budget: SearchBudget | None = None) -> BerryEstimate:
    """Least y not shown definable (by a formula shorter than 5*ell_T) within the budget.

    Candidate formulas are those theta for which the bounded theorem trace
    contains D(theta, y); each y below the answer has a recorded witness.
    """
    budget = budget or SearchBudget()
    bound = 5 * arith.ell(theory)
    witnesses: dict[int, Formula] = {}
    for code in theorem_stream(theory, budget).codes:
        phi = godel_decode(code)
        shaped = None if phi is None else _defining_formula(phi)
        if shaped is None:
            continue
        theta, y = shaped
        if length(theta) < bound and arith.d_formula(theta, y) == phi and y not in witnesses:
            witnesses[y] = theta
    b = 0
    while b in witnesses:
        b += 1
    kept = {y: witnesses[y] for y in range(b)}
    return BerryEstimate(b, budget, bound, kept, budget.enumeration_limit, theory)


# ---------------------------------------------------------------------------
# Towers and the iota search


def output_formula_len(j: int) -> int:
    return length(arith.output_formula(j))


def hbar_len(n: int) -> int:
    """Largest m with len("phi_j(0) halts with output x") < n for every j < m.

    That length is L0 + 3j, L0 the length at j = 0.
    """
    l0 = output_formula_len(0)
    if n <= l0:
        return 0
    return (n - l0 - 1) // 3 + 1


@dataclass(frozen=True)
class TowerLevel:
    theory: TheorySpec
    certificate: ChaitinCertificate | BoolosBundle
    witness: int | None
    new_axiom: Formula | None

    def to_json(self) -> dict:
        return {
            "theory": self.theory.to_manifest(),
            "certificate": self.certificate.to_json()["result"],
            "witness": _big(self.witness),
            "new_axiom": None if self.new_axiom is None else to_sexpr(self.new_axiom),
        }


@dataclass(frozen=True)
class Tower:
    base: TheorySpec
    step: str
    depth: int
    budget: SearchBudget
    levels: tuple[TowerLevel, ...]

    @property
    def sequence(self) -> list[int]:
        """c_{T_i} for a chaitin tower, ell_{T_i} for a boolos tower."""
        if self.step == "chaitin":
            return [lv.certificate.c for lv in self.levels]
        return [lv.certificate.ell for lv in self.levels]

    def to_json(self) -> dict:
        out = _header("tower", self.base, self.budget, {"step": self.step, "depth": self.depth})
        out["result"] = {"levels": [lv.to_json() for lv in self.levels], "sequence": [str(v) for v in self.sequence]}
        return out


def theory_tower(base: TheorySpec, step: str, depth: int, budget: SearchBudget | None = None, cap: int = TOWER_CAP) -> Tower:
    """T_0 = base, T_{i+1} = T_i + the independent sentence of the chosen construction.

    ``chaitin``: add "K(w) > c_{T_i}" for the budget-relative witness w.
    ``boolos``:  add "not Def^{<5 ell}(b)" for the budget-relative estimate b.
    """
    if step not in ("chaitin", "boolos"):
        raise ValueError("step must be 'chaitin' or 'boolos'")
    if depth < 0 or depth > cap:
        raise ConstructionError(f"tower depth {depth} outside 0..{cap}")
    budget = budget or SearchBudget()
    levels = []
    theory = base
    for i in range(depth + 1):
        if step == "chaitin":
            cert = chaitin_constant(theory, budget)
            witness = chaitin_witness(theory, cert.c, budget)
            axiom = arith.k_compare_formula(witness, cert.c, ">")
        else:
            cert = boolos_bundle(theory)
            witness = berry_estimate(theory, budget).b_hat
            axiom = Not(arith.def_formula(theory, Mul(Num(5), Num(cert.ell)), Num(witness)))
        last = i == depth
        levels.append(TowerLevel(theory, cert, witness, None if last else axiom))
        if not last:
            theory = extend(theory, axiom, name=f"{base.name}_{i + 1}")
    return Tower(base, step, depth, budget, tuple(levels))


def iota_search(x: int, tower: Tower) -> int:
    """Least level i with hbar_len(5 * ell_{T_i}) > x."""
    if tower.step != "boolos":
        raise ValueError("iota_search needs a boolos tower")
    for i, lv in enumerate(tower.levels):
        if hbar_len(lv.certificate.bound) > x:
            return i
    raise ConstructionError(f"tower of {len(tower.levels)} levels never exceeds {x}")


# ---------------------------------------------------------------------------
# JSON and replay


def canonical(cert_json: dict) -> str:
    return json.dumps(cert_json, sort_keys=True, ensure_ascii=False)


def build(kind: str, theory: TheorySpec, budget: SearchBudget, params: dict | None = None):
    params = params or {}
    if kind == "kleene":
        return kleene_index(theory, budget)
    if kind == "chaitin":
        return chaitin_constant(theory, budget)
    if kind == "boolos":
        return boolos_bundle(theory)
    if kind == "berry":
        return berry_estimate(theory, budget)
    if kind == "nonrosser":
        return nonrosser_extension(theory, budget, int(params.get("sample", 50)))
    if kind == "tower":
        return theory_tower(theory, params["step"], int(params["depth"]), budget)
    raise ValueError(f"unknown certificate kind {kind!r}")


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    kind: str
    reason: str = ""


def replay(cert_json: dict) -> ReplayResult:
    """Rebuild a certificate from its embedded inputs and compare canonically."""
    kind = cert_json.get("kind", "?")
    if cert_json.get("version") != CERT_VERSION or cert_json.get("coding") != CODING_VERSION:
        return ReplayResult(False, kind, "version mismatch")
    try:
        theory = TheorySpec.from_manifest(cert_json["theory"])
        budget = SearchBudget.from_json(cert_json["budget"]) if cert_json.get("budget") else SearchBudget()
        fresh = build(kind, theory, budget, cert_json.get("params")).to_json()
    except (KeyError, ValueError, ConstructionError) as exc:
        return ReplayResult(False, kind, f"rebuild failed: {exc}")
    if canonical(fresh) != canonical(cert_json):
        return ReplayResult(False, kind, "recomputed certificate differs")
    return ReplayResult(True, kind)
