"""Recursively enumerable theories as values.

Every theory has a *theorem enumerator*: a program index ``E`` such that
``phi_E(k)`` is the Goedel code of the k-th theorem (or diverges when k
names no theorem).  Its theorem set is the range of ``phi_E``, explored by
dovetailing ``E`` over the inputs ``0..index_limit``.

* ``Axiomatic``: ``phi_E(m)`` decodes ``m`` as a derivation from the axioms
  in the Hilbert calculus of :mod:`godelkit.proofs` (primitive DERIVE).
* ``Stream``: ``E`` is an arbitrary program.
* ``Extension(base, psi)``: even inputs replay the base enumerator, odd
  inputs decode derivations from ``psi`` and base theorems.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from . import arith
from .arith import Formula, godel_decode, godel_encode, parse_sexpr, to_sexpr
from .machine import (
    CODING_VERSION,
    Halted,
    SearchBudget,
    dovetail,
    eval_index,
    index_of,
    pair,
    unpair,
)
from .proofs import Q_AXIOMS, logical_rule

META_FLAGS = frozenset({"contains-Q", "consistent", "sigma1-sound", "cond-i", "cond-ii", "cond-iii", "cond-iv"})
KINDS = ("axiomatic", "stream", "extension")


# ---------------------------------------------------------------------------
# Derivation codes
#
# unpair(m) = (tag, payload):
#   0 Axiom(i)          the i-th axiom of the context
#   1 Hyp(pair(k, n))   phi_base(k), if it halts within n steps
#   2 MP(pair(m1, m2))  modus ponens, m1 proves A and m2 proves A -> B
#   3 Gen(pair(v, m1))  forall x_{v+1} of what m1 proves
#   4 Logical(code)     a logical axiom instance


def context_code(axioms: tuple[Formula, ...], base: int | None) -> int:
    """Axioms as s-expressions plus the base enumerator in hex, as one byte string."""
    blob = json.dumps([[to_sexpr(a) for a in axioms], None if base is None else format(base, "x")])
    return int.from_bytes(b"\x01" + blob.encode("ascii"), "big")


@lru_cache(maxsize=256)
def _context(ctx: int) -> tuple[tuple[Formula, ...], int | None] | None:
    raw = ctx.to_bytes((ctx.bit_length() + 7) // 8, "big")
    if raw[:1] != b"\x01":
        return None
    try:
        texts, base = json.loads(raw[1:].decode("ascii"))
        axioms = tuple(parse_sexpr(t) for t in texts)
        base = None if base is None else int(base, 16)
    except (ValueError, TypeError, AttributeError, UnicodeDecodeError):
        return None
    if [to_sexpr(a) for a in axioms] != texts:
        return None
    return axioms, base


MAX_DERIVATION_DEPTH = 64


def derive(axioms: tuple[Formula, ...], base: int | None, m: int, depth: int = 0) -> Formula | None:
    """The formula derivation code ``m`` proves, or None if it is not a derivation."""
    if depth > MAX_DERIVATION_DEPTH:
        return None
    tag, payload = unpair(m)
    if tag == 0:
        return axioms[payload] if payload < len(axioms) else None
    if tag == 1:
        if base is None:
            return None
        k, n = unpair(payload)
        out = eval_index(base, k, max(n, 1))
        return godel_decode(out.value) if isinstance(out, Halted) else None
    if tag == 2:
        m1, m2 = unpair(payload)
        a = derive(axioms, base, m1, depth + 1)
        if a is None:
            return None
        ab = derive(axioms, base, m2, depth + 1)
        if isinstance(ab, arith.Implies) and ab.left == a:
            return ab.right
        return None
    if tag == 3:
        v, m1 = unpair(payload)
        body = derive(axioms, base, m1, depth + 1)
        return None if body is None else arith.ForAll(v + 1, body)
    if tag == 4:
        phi = godel_decode(payload)
        return phi if phi is not None and logical_rule(phi) is not None else None
    return None


def derive_from_context(ctx: int, m: int) -> int:
    """``1 + code`` of what derivation ``m`` proves from context ``ctx``, else 0."""
    parsed = _context(ctx)
    if parsed is None:
        return 0
    phi = derive(parsed[0], parsed[1], m)
    return 0 if phi is None else 1 + godel_encode(phi)


def derivation_code(tag: str, *args: int) -> int:
    """Build a derivation code: ``axiom(i)``, ``hyp(k, n)``, ``mp(m1, m2)``, ``gen(v, m)``, ``logical(code)``."""
    if tag == "axiom":
        return pair(0, args[0])
    if tag == "hyp":
        return pair(1, pair(args[0], args[1]))
    if tag == "mp":
        return pair(2, pair(args[0], args[1]))
    if tag == "gen":
        return pair(3, pair(args[0] - 1, args[1]))
    if tag == "logical":
        return pair(4, args[0])
    raise ValueError(tag)


_DERIVER = """
    SET 1 {ctx}
    PRIM DERIVE 0 1 0
    DECJZ 0 loop
    HALT
loop:
    JMP loop
"""

_EXTENDER = """
    SET 2 2
    PRIM MOD 1 0 2
    PRIM DIV 3 0 2
    DECJZ 1 even
    SET 5 {ctx}
    PRIM DERIVE 0 5 3
    DECJZ 0 loop
    HALT
even:
    SET 6 {base}
    CALL 0 6 3
    HALT
loop:
    JMP loop
"""


def axiomatic_enumerator(axioms: tuple[Formula, ...]) -> int:
    return index_of(_DERIVER.format(ctx=context_code(axioms, None)))


@lru_cache(maxsize=1024)
def extension_enumerator(base_enum: int, psi_code: int) -> int:
    """Enumerator of base + psi: ``2k`` replays the base, ``2k+1`` decodes derivation k."""
    psi = godel_decode(psi_code)
    axioms = () if psi is None else (psi,)
    return index_of(_EXTENDER.format(ctx=context_code(axioms, base_enum), base=base_enum))


# ---------------------------------------------------------------------------
# Theories


@dataclass(frozen=True)
class TheorySpec:
    """An RE theory.  ``meta_flags`` are caller-asserted and never verified."""

    kind: str
    name: str = ""
    axioms: tuple[Formula, ...] = ()
    stream_index: int | None = None
    base: "TheorySpec | None" = None
    sentence: Formula | None = None
    meta_flags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown theory kind {self.kind!r}")
        unknown = set(self.meta_flags) - META_FLAGS
        if unknown:
            raise ValueError(f"unknown meta flags {sorted(unknown)}")
        if self.kind == "stream" and self.stream_index is None:
            raise ValueError("stream theory needs an enumerator index")
        if self.kind == "extension" and (self.base is None or self.sentence is None):
            raise ValueError("extension needs a base and a sentence")

    @cached_property
    def enumerator(self) -> int:
        if self.kind == "axiomatic":
            return axiomatic_enumerator(self.axioms)
        if self.kind == "stream":
            return self.stream_index
        return extension_enumerator(self.base.enumerator, godel_encode(self.sentence))

    def to_manifest(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.name:
            out["name"] = self.name
        if self.kind == "axiomatic":
            out["axioms"] = [to_sexpr(a) for a in self.axioms]
        elif self.kind == "stream":
            out["enumerator"] = str(self.stream_index)
        else:
            out["base"] = self.base.to_manifest()
            out["sentence"] = to_sexpr(self.sentence)
        out["meta_flags"] = sorted(self.meta_flags)
        return out

    @classmethod
    def from_manifest(cls, data: dict) -> "TheorySpec":
        kind = data.get("kind")
        flags = frozenset(data.get("meta_flags", ()))
        name = data.get("name", "")
        if kind == "axiomatic":
            return cls("axiomatic", name, axioms=tuple(parse_sexpr(s) for s in data["axioms"]), meta_flags=flags)
        if kind == "stream":
            if "program" in data:
                index = index_of(data["program"])
            else:
                index = int(data["enumerator"])
            return cls("stream", name, stream_index=index, meta_flags=flags)
        if kind == "extension":
            return cls(
                "extension",
                name,
                base=cls.from_manifest(data["base"]),
                sentence=parse_sexpr(data["sentence"]),
                meta_flags=flags,
            )
        raise ValueError(f"unknown theory kind {kind!r}")

    def dumps(self) -> str:
        return json.dumps(self.to_manifest(), sort_keys=True)


def axiomatic(axioms, name: str = "", meta_flags=()) -> TheorySpec:
    return TheorySpec("axiomatic", name, axioms=tuple(axioms), meta_flags=frozenset(meta_flags))


def stream(index: int | str, name: str = "", meta_flags=()) -> TheorySpec:
    if isinstance(index, str):
        index = index_of(index)
    return TheorySpec("stream", name, stream_index=index, meta_flags=frozenset(meta_flags))


def extend(theory: TheorySpec, psi: Formula, name: str = "") -> TheorySpec:
    """T + psi.  Meta flags are reset: claims about T do not transfer."""
    return TheorySpec("extension", name or f"{theory.name}+", base=theory, sentence=psi)


def load_manifest(path) -> TheorySpec:
    with open(path, encoding="utf-8") as fh:
        return TheorySpec.from_manifest(json.load(fh))


# ---------------------------------------------------------------------------
# Enumeration and proof search


@dataclass(frozen=True)
class TraceItem:
    stage: int
    input: int
    code: int


@dataclass(frozen=True)
class EnumerationTrace:
    items: tuple[TraceItem, ...]
    budget: SearchBudget

    @property
    def codes(self) -> list[int]:
        return [it.code for it in self.items]

    def to_jsonl(self) -> str:
        rows = []
        for it in self.items:
            phi = godel_decode(it.code)
            rows.append(json.dumps({
                "stage": it.stage,
                "input": it.input,
                "code": str(it.code),
                "formula": None if phi is None else arith.to_text(phi),
            }))
        return "\n".join(rows) + ("\n" if rows else "")


@lru_cache(maxsize=256)
def _trace(enumerator: int, budget: SearchBudget) -> EnumerationTrace:
    hits = dovetail(enumerator, budget, max_hits=budget.enumeration_limit)
    return EnumerationTrace(tuple(TraceItem(h.stage, h.input, h.value) for h in hits), budget)


def theorem_stream(theory: TheorySpec, budget: SearchBudget) -> EnumerationTrace:
    """Theorems found by dovetailing the enumerator, in discovery order."""
    return _trace(theory.enumerator, budget)


@dataclass(frozen=True)
class Yes:
    stage: int


@dataclass(frozen=True)
class Unknown:
    pass


def proves(theory: TheorySpec, phi: Formula, budget: SearchBudget) -> Yes | Unknown:
    code = godel_encode(phi)
    for it in theorem_stream(theory, budget).items:
        if it.code == code:
            return Yes(it.stage)
    return Unknown()


_KT = """
    PRIM NHALT 1 0 0
    INC 1
    SET 2 0
    SET 7 {enum}
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


@lru_cache(maxsize=1024)
def kt_index(enumerator: int) -> int:
    """Index ``h`` with ``W_h = {n : phi_enumerator emits the code of "phi_n(n) diverges"}``.

    On input n it searches s = pair(k, j) for a run of the enumerator on k
    that halts within 2**j steps with that code.
    """
    return index_of(_KT.format(enum=enumerator))


def kT_enumerator(theory: TheorySpec) -> int:
    return kt_index(theory.enumerator)


# ---------------------------------------------------------------------------
# Corpus


def nonhalt_stream_program(ns) -> str:
    """A stream enumerator emitting "phi_n(n) diverges" for the listed n, one per input."""
    lines = []
    for k, n in enumerate(ns):
        lines.append(f"SET 1 {k}\nJEQ 0 1 emit{k}")
    lines.append("loop:\nJMP loop")
    for k, n in enumerate(ns):
        lines.append(f"emit{k}:\nSET 0 {godel_encode(arith.nonhalt_formula(n, n))}\nHALT")
    return "\n".join(lines)


def constant_stream_program(codes) -> str:
    """Emit the given codes on inputs 0, 1, ...; diverge on larger inputs."""
    lines = []
    for k, _ in enumerate(codes):
        lines.append(f"SET 1 {k}\nJEQ 0 1 emit{k}")
    lines.append("loop:\nJMP loop")
    for k, c in enumerate(codes):
        lines.append(f"emit{k}:\nSET 0 {c}\nHALT")
    return "\n".join(lines)


EMPTY_PROGRAM = "loop:\nJMP loop"

ADVERSARY = """
    SET 1 1
    SET 2 2
    PRIM POW 3 2 0
    PRIM POW 4 2 3
    PRIM POW 5 2 4
    SET 6 0
    PRIM KGT 0 6 5
    HALT
"""


def q_theory() -> TheorySpec:
    return axiomatic(Q_AXIOMS.values(), "Q", {"contains-Q", "consistent", "sigma1-sound"})


def corpus() -> dict[str, TheorySpec]:
    """Toy theories exercising every construction."""
    zero_eq = godel_encode(arith.Eq(arith.ZERO, arith.ZERO))
    return {
        "empty": stream(EMPTY_PROGRAM, "empty", {"consistent", "sigma1-sound"}),
        "zero-eq-zero": stream(constant_stream_program([zero_eq]), "zero-eq-zero", {"consistent", "sigma1-sound"}),
        "kleene-2-5": stream(nonhalt_stream_program([2, 5]), "kleene-2-5", {"consistent"}),
        "Q": q_theory(),
        "identity": stream("HALT", "identity"),
        "adversary": stream(ADVERSARY, "adversary"),
    }


def manifest_with_version(theory: TheorySpec) -> dict:
    return {"coding": CODING_VERSION, "theory": theory.to_manifest()}
