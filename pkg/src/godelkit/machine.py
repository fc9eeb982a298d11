"""Register machines over the naturals and the numbering phi_0, phi_1, ...

Programs are finite instruction sequences.  Every natural number decodes to a
program: the index is read as a bijective binary string, parsed as a sequence
of self-delimiting instructions, and anything that fails to parse becomes the
canonical self-loop ``[JEQ 0 0 0]``.

Instruction set (registers r0..r63, all start at 0 except r0 = argument)::

    HALT                  stop; output is r0
    INC r                 r += 1
    DECJZ r a             if r == 0 jump to a, else r -= 1
    SET r c               r := c
    JEQ r s a             if r == s jump to a
    PRIM k d s t          d := prim_k(s, t)
    CALL d i x            d := phi_i(x)            (diverges if phi_i(x) does)
    RUN d i x n           d := 1 + phi_i(x) if it halts within n steps else 0

Falling off the end of the program halts.  Every executed instruction costs
one step; ``CALL``/``RUN`` additionally pay for the steps of the inner
computation and ``PRIM`` pays one extra step per 1024 bits of its result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, NamedTuple, Sequence

CODING_VERSION = "godelkit-machine-1"

MAX_REGISTERS = 64
CHARGE_BITS = 1024

OPCODES = ("HALT", "INC", "DECJZ", "SET", "JEQ", "PRIM", "CALL", "RUN")
ARITY = {"HALT": 0, "INC": 1, "DECJZ": 2, "SET": 2, "JEQ": 3, "PRIM": 4, "CALL": 3, "RUN": 4}


# ---------------------------------------------------------------------------
# Cantor pairing


def pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


# ---------------------------------------------------------------------------
# Budgets and outcomes


@dataclass(frozen=True)
class SearchBudget:
    """Desk-scale truncation of unbounded searches.

    ``step_limit`` caps a single evaluation; for a dovetailed enumeration it
    caps the total number of simulated steps across all interleaved runs.
    ``index_limit`` is the largest index / input a scan visits and
    ``enumeration_limit`` the number of items drawn from an enumerator (it
    also bounds exhaustive scans inside truth evaluation).
    """

    step_limit: int = 100_000
    index_limit: int = 200
    enumeration_limit: int = 200

    def __post_init__(self) -> None:
        for name in ("step_limit", "index_limit", "enumeration_limit"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def to_json(self) -> dict:
        return {
            "step_limit": self.step_limit,
            "index_limit": self.index_limit,
            "enumeration_limit": self.enumeration_limit,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SearchBudget":
        return cls(int(data["step_limit"]), int(data["index_limit"]), int(data["enumeration_limit"]))


@dataclass(frozen=True)
class Halted:
    value: int
    steps: int = 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Halted) and other.value == self.value

    def __hash__(self) -> int:
        return hash(("Halted", self.value))

    def __str__(self) -> str:
        return f"Halted({self.value})"


@dataclass(frozen=True)
class Exhausted:
    steps: int

    def __str__(self) -> str:
        return f"Exhausted({self.steps})"


EvalOutcome = Halted | Exhausted


# ---------------------------------------------------------------------------
# Programs


class Instr(NamedTuple):
    op: str
    args: tuple[int, ...]

    def __str__(self) -> str:
        if self.op == "PRIM":
            k, *rest = self.args
            name = PRIM_NAMES[k] if k < len(PRIM_NAMES) else str(k)
            return " ".join(["PRIM", name, *map(str, rest)])
        return " ".join([self.op, *map(str, self.args)])


def _registers(ins: Instr) -> tuple[int, ...]:
    a = ins.args
    return {
        "HALT": (),
        "INC": (a[0],) if a else (),
        "DECJZ": a[:1],
        "SET": a[:1],
        "JEQ": a[:2],
        "PRIM": a[1:4],
        "CALL": a[:3],
        "RUN": a[:4],
    }[ins.op]


def _target(ins: Instr) -> int | None:
    if ins.op == "DECJZ":
        return ins.args[1]
    if ins.op == "JEQ":
        return ins.args[2]
    return None


class ProgramError(ValueError):
    pass


@dataclass(frozen=True)
class Program:
    instrs: tuple[Instr, ...]

    def __post_init__(self) -> None:
        n = len(self.instrs)
        for ins in self.instrs:
            if ins.op not in ARITY or len(ins.args) != ARITY[ins.op]:
                raise ProgramError(f"bad instruction {ins!r}")
            if any(v < 0 for v in ins.args):
                raise ProgramError(f"negative operand in {ins}")
            if any(r >= MAX_REGISTERS for r in _registers(ins)):
                raise ProgramError(f"register out of range in {ins}")
            t = _target(ins)
            if t is not None and t > n:
                raise ProgramError(f"jump target out of range in {ins}")
            if ins.op == "PRIM" and ins.args[0] >= len(PRIM_NAMES):
                raise ProgramError(f"unknown primitive in {ins}")

    @property
    def register_count(self) -> int:
        regs = [r for ins in self.instrs for r in _registers(ins)]
        return max(regs, default=0) + 1

    def __len__(self) -> int:
        return len(self.instrs)

    def to_text(self) -> str:
        return "\n".join(str(i) for i in self.instrs)

    def to_sexpr(self) -> str:
        return "(" + " ".join("(" + str(i) + ")" for i in self.instrs) + ")"

    @classmethod
    def from_text(cls, text: str) -> "Program":
        return assemble(text)

    def shifted(self, offset: int) -> tuple[Instr, ...]:
        out = []
        for ins in self.instrs:
            if ins.op == "DECJZ":
                out.append(Instr("DECJZ", (ins.args[0], ins.args[1] + offset)))
            elif ins.op == "JEQ":
                out.append(Instr("JEQ", (ins.args[0], ins.args[1], ins.args[2] + offset)))
            else:
                out.append(ins)
        return tuple(out)


CANONICAL_LOOP = Program((Instr("JEQ", (0, 0, 0)),))


def assemble(text: str) -> Program:
    """Assemble the line format, with optional ``label:`` lines and ``JMP label``.

    ``JMP`` expands to ``DECJZ 63 label``; register 63 is reserved as the
    always-zero register in assembled code.  Operands may be labels, decimal
    naturals, or primitive names (for ``PRIM``).
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    labels: dict[str, int] = {}
    body: list[list[str]] = []
    for line in lines:
        if line.endswith(":"):
            labels[line[:-1].strip()] = len(body)
        else:
            body.append(line.split())
    instrs = []
    for toks in body:
        op = toks[0].upper()
        args = toks[1:]
        if op == "JMP":
            op, args = "DECJZ", ["63", args[0]]

        def val(tok: str) -> int:
            if tok in labels:
                return labels[tok]
            if tok.upper() in PRIM_INDEX:
                return PRIM_INDEX[tok.upper()]
            return int(tok)

        if op not in ARITY:
            raise ProgramError(f"unknown opcode {op}")
        instrs.append(Instr(op, tuple(val(a) for a in args)))
    return Program(tuple(instrs))


# ---------------------------------------------------------------------------
# Index coding: bijective binary string of self-delimiting instructions


def _delta(v: int) -> str:
    """Elias delta code of v + 1: gamma code of its bit length, then its bits after the leading 1."""
    b = bin(v + 1)[2:]
    n = bin(len(b))[2:]
    return "0" * (len(n) - 1) + n + b[1:]


def encode_program(p: Program) -> int:
    parts = []
    for ins in p.instrs:
        parts.append(format(OPCODES.index(ins.op), "03b"))
        parts.extend(_delta(a) for a in ins.args)
    return int("1" + "".join(parts), 2) - 1


def _parse(bits: str) -> Program | None:
    pos = 0
    n = len(bits)
    instrs = []
    while pos < n:
        if pos + 3 > n:
            return None
        op = OPCODES[int(bits[pos:pos + 3], 2)]
        pos += 3
        args = []
        for _ in range(ARITY[op]):
            z = bits.find("1", pos)
            if z < 0:
                return None
            k = z - pos
            if z + k + 1 > n:
                return None
            width = int(bits[z:z + k + 1], 2)
            pos = z + k + 1
            if pos + width - 1 > n:
                return None
            args.append(int("1" + bits[pos:pos + width - 1], 2) - 1)
            pos += width - 1
        instrs.append(Instr(op, tuple(args)))
    try:
        return Program(tuple(instrs))
    except ProgramError:
        return None


@lru_cache(maxsize=8192)
def _decode(n: int) -> tuple[Program, bool]:
    bits = bin(n + 1)[3:]
    p = _parse(bits)
    if p is None:
        return CANONICAL_LOOP, False
    return p, True


def decode_program(n: int) -> Program:
    """Total decoding: ill-formed indices give the canonical self-loop."""
    if n < 0:
        raise ValueError("indices are natural numbers")
    return _decode(n)[0]


def is_well_formed_index(n: int) -> bool:
    return _decode(n)[1]


def index_of(program: Program | str) -> int:
    if isinstance(program, str):
        program = assemble(program)
    return encode_program(program)


def statically_diverges(i: int) -> bool:
    """True when ``decode(i)`` is the canonical loop, which diverges on every input."""
    return decode_program(i) == CANONICAL_LOOP


# ---------------------------------------------------------------------------
# Primitive table.  Entries past SND are implemented in other modules and
# imported lazily; the slot numbers are part of the coding.


def _monus(a: int, b: int) -> int:
    return a - b if a > b else 0


def _prim_smn(a: int, b: int) -> int:
    return smn(a, b)


def _prim_nhalt(a: int, b: int) -> int:
    from .arith import godel_encode, nonhalt_formula

    return godel_encode(nonhalt_formula(a, a))


def _prim_kgt(a: int, b: int) -> int:
    from .arith import godel_encode, k_compare_formula

    return godel_encode(k_compare_formula(a, b, ">"))


def _prim_kgt_parse(a: int, b: int) -> int:
    from .arith import parse_k_greater

    found = parse_k_greater(a)
    return 0 if found is None else 1 + pair(*found)


def _prim_derive(a: int, b: int) -> int:
    from .theory import derive_from_context

    return derive_from_context(a, b)


def _prim_extenum(a: int, b: int) -> int:
    from .theory import extension_enumerator

    return extension_enumerator(a, b)


PRIMS: tuple[tuple[str, Callable[[int, int], int]], ...] = (
    ("ADD", lambda a, b: a + b),
    ("MONUS", _monus),
    ("MUL", lambda a, b: a * b),
    ("DIV", lambda a, b: a // b if b else 0),
    ("MOD", lambda a, b: a % b if b else a),
    ("POW", lambda a, b: a ** b),
    ("PAIR", pair),
    ("FST", lambda a, b: unpair(a)[0]),
    ("SND", lambda a, b: unpair(a)[1]),
    ("SMN", _prim_smn),
    ("NHALT", _prim_nhalt),
    ("KGT", _prim_kgt),
    ("KGTPARSE", _prim_kgt_parse),
    ("DERIVE", _prim_derive),
    ("EXTENUM", _prim_extenum),
)
PRIM_NAMES = tuple(name for name, _ in PRIMS)
PRIM_INDEX = {name: k for k, name in enumerate(PRIM_NAMES)}
_POW = PRIM_INDEX["POW"]


# ---------------------------------------------------------------------------
# Resumable interpreter


class _Frame:
    __slots__ = ("code", "regs", "pc", "dest", "kind", "own_deadline", "deadline", "paid")

    def __init__(self, program: Program, arg: int, dest: int, kind: str, own: float, parent: float):
        self.code = program.instrs
        self.regs = [0] * program.register_count
        self.regs[0] = arg
        self.pc = 0
        self.dest = dest
        self.kind = kind
        self.own_deadline = own
        self.deadline = min(own, parent)
        self.paid = 0  # steps already charged towards a pending POW


INF = math.inf


class Machine:
    """A resumable run of ``phi_index`` on ``arg``.

    ``advance(n)`` executes at most ``n`` more steps and returns the output
    value once the top-level program has halted, else ``None``.
    """

    def __init__(self, index: int, arg: int):
        self.index = index
        self.arg = arg
        self.steps = 0
        self.value: int | None = None
        self.frames = [_Frame(decode_program(index), arg, 0, "top", INF, INF)]

    @property
    def halted(self) -> bool:
        return self.value is not None

    def _return(self, value: int) -> None:
        frame = self.frames.pop()
        if not self.frames:
            self.value = value
            return
        parent = self.frames[-1]
        parent.regs[frame.dest] = value + 1 if frame.kind == "run" else value

    def _abort_runs(self) -> None:
        # unwind to the outermost RUN frame whose own deadline has passed
        for pos, fr in enumerate(self.frames):
            if fr.own_deadline <= self.steps:
                dest = fr.dest
                del self.frames[pos:]
                self.frames[-1].regs[dest] = 0
                return

    def advance(self, n: int) -> int | None:
        if self.value is not None:
            return self.value
        limit = self.steps + n
        frames = self.frames
        while self.steps < limit:
            fr = frames[-1]
            if self.steps >= fr.deadline:
                self._abort_runs()
                continue
            code = fr.code
            if fr.pc >= len(code):
                self._return(fr.regs[0])
                if self.value is not None:
                    return self.value
                continue
            op, a = code[fr.pc]
            regs = fr.regs
            self.steps += 1
            if op == "INC":
                regs[a[0]] += 1
                fr.pc += 1
            elif op == "DECJZ":
                if regs[a[0]] == 0:
                    fr.pc = a[1]
                else:
                    regs[a[0]] -= 1
                    fr.pc += 1
            elif op == "HALT":
                self._return(regs[0])
                if self.value is not None:
                    return self.value
            elif op == "SET":
                regs[a[0]] = a[1]
                fr.pc += 1
            elif op == "JEQ":
                fr.pc = a[2] if regs[a[0]] == regs[a[1]] else fr.pc + 1
            elif op == "PRIM":
                k, d, s, t = a
                x, y = regs[s], regs[t]
                if k == _POW and x > 1:
                    # charge before computing so huge powers are never built
                    cost = y * x.bit_length() // CHARGE_BITS if y.bit_length() <= 64 else 1 << 64
                    room = int(min(limit, fr.deadline) - self.steps)
                    if fr.paid + room < cost:
                        # the instruction step just taken counts towards the cost
                        fr.paid += room + 1
                        self.steps += room
                        continue
                    self.steps += cost - fr.paid
                    fr.paid = 0
                    r = x ** y
                else:
                    r = PRIMS[k][1](x, y)
                    self.steps += r.bit_length() // CHARGE_BITS
                regs[d] = r
                fr.pc += 1
            elif op == "CALL":
                d, i, x = a
                fr.pc += 1
                frames.append(_Frame(decode_program(regs[i]), regs[x], d, "call", INF, fr.deadline))
            elif op == "RUN":
                d, i, x, m = a
                fr.pc += 1
                own = self.steps + regs[m]
                frames.append(_Frame(decode_program(regs[i]), regs[x], d, "run", own, fr.deadline))
        return None


def eval_index(i: int, arg: int, budget: SearchBudget | int) -> EvalOutcome:
    """Simulate ``phi_i(arg)`` for at most ``step_limit`` steps."""
    limit = budget if isinstance(budget, int) else budget.step_limit
    m = Machine(i, arg)
    v = m.advance(limit)
    if v is None:
        return Exhausted(limit)
    return Halted(v, m.steps)


def eval_binary(i: int, a: int, x: int, budget: SearchBudget | int) -> EvalOutcome:
    return eval_index(i, pair(a, x), budget)


# ---------------------------------------------------------------------------
# s-m-n and the recursion theorem


@lru_cache(maxsize=4096)
def smn(i: int, a: int) -> int:
    """Index of ``x -> phi_i(pair(a, x))``; total and computable in (i, a)."""
    body = decode_program(i)
    prefix = (
        Instr("SET", (1, a)),
        Instr("PRIM", (PRIM_INDEX["PAIR"], 0, 1, 0)),
        Instr("SET", (1, 0)),
    )
    return encode_program(Program(prefix + body.shifted(len(prefix))))


_DIAGONAL = """
    PRIM FST 1 0 0
    PRIM SND 2 0 0
    PRIM SMN 3 1 1
    SET 5 {f}
    CALL 4 5 3
    CALL 0 4 2
    HALT
"""


def fixed_point(f: int) -> int:
    """Second recursion theorem: ``e`` with ``phi_e = phi_{phi_f(e)}``.

    ``d(pair(y, x)) = phi_{phi_f(smn(y, y))}(x)`` and ``e = smn(d, d)``.
    """
    d = index_of(_DIAGONAL.format(f=f))
    return smn(d, d)


def curry_transformer(g: int) -> int:
    """Index of the total transformer ``e -> smn(g, e)``."""
    return index_of(f"SET 1 {g}\nPRIM SMN 0 1 0\nHALT")


def self_applying(g: int) -> int:
    """``e`` with ``phi_e(x) = phi_g(pair(e, x))`` for a binary program ``g``."""
    return fixed_point(curry_transformer(g))


# ---------------------------------------------------------------------------
# Dovetailing


@dataclass(frozen=True)
class DovetailHit:
    stage: int
    input: int
    value: int


def dovetail(index: int, budget: SearchBudget, max_hits: int | None = None) -> Iterator[DovetailHit]:
    """Interleave ``phi_index`` on inputs 0..index_limit.

    Stage ``s`` admits input ``s`` and then advances every live run by one
    step, in order of admission.  Runs that halt are reported once, in
    discovery order.  ``step_limit`` bounds the total simulated steps.
    """
    live: list[Machine] = []
    spent = 0
    hits = 0
    stage = 0
    while spent < budget.step_limit:
        if stage <= budget.index_limit:
            live.append(Machine(index, stage))
        elif not live:
            return
        still = []
        for m in live:
            before = m.steps
            v = m.advance(1)
            spent += m.steps - before
            if v is not None:
                yield DovetailHit(stage, m.arg, v)
                hits += 1
                if max_hits is not None and hits >= max_hits:
                    return
            else:
                still.append(m)
            if spent >= budget.step_limit:
                return
        live = still
        stage += 1


def enumerate_domain(i: int, budget: SearchBudget) -> list[int]:
    """Prefix of ``W_i`` in dovetail discovery order."""
    return [h.input for h in dovetail(i, budget)]


# ---------------------------------------------------------------------------
# Index-based complexity


def k_upper(m: int, budget: SearchBudget, candidates: Sequence[int] = ()) -> int | None:
    """Least index known to output ``m`` on input 0.

    Scans indices ``0..index_limit`` plus any extra ``candidates`` (indices
    already known from a construction).  The answer only decreases as the
    budget grows and equals K(m) once the budget covers the minimal witness.
    """
    for i in range(budget.index_limit + 1):
        out = eval_index(i, 0, budget)
        if isinstance(out, Halted) and out.value == m:
            return i
    found = [c for c in sorted(set(candidates)) if c > budget.index_limit]
    for c in found:
        out = eval_index(c, 0, budget)
        if isinstance(out, Halted) and out.value == m:
            return c
    return None


def output_table(budget: SearchBudget, upto: int | None = None) -> dict[int, EvalOutcome]:
    last = budget.index_limit if upto is None else upto
    return {i: eval_index(i, 0, budget) for i in range(last + 1)}


def lower_bounder_gadget(g: int) -> int:
    """Binary program ``pair(e, x) -> phi_g(e)``."""
    return index_of(f"PRIM FST 1 0 0\nSET 2 {g}\nCALL 0 2 1\nHALT")


def refute_lower_bounder(g: int, budget: SearchBudget) -> tuple[int, int]:
    """Fixed point ``e`` with ``phi_e(x) = phi_g(e)``; returns ``(e, phi_e(0))``.

    Since ``phi_e(0) = g(e)``, K(g(e)) <= e, so ``g`` cannot satisfy
    K(g(m)) > m for every m.  Raises ``TimeoutError`` if ``g`` diverges on
    ``e`` within the budget.
    """
    e = self_applying(lower_bounder_gadget(g))
    out = eval_index(e, 0, budget)
    if not isinstance(out, Halted):
        raise TimeoutError(f"phi_g did not halt on the fixed point within {budget.step_limit} steps")
    return e, out.value
