"""First-order arithmetic: terms, formulas, lengths, Goedel codes and the
formula constructors used by the incompleteness constructions.

Numerals are stored compactly as ``Num(m)`` but denote ``s(s(...s(0)...))``;
``succ`` keeps that canonical, so ``succ(Num(3)) == Num(4)``.

Symbol lengths: every logical or arithmetic symbol (0, s, +, *, <, =, the
connectives, quantifiers, parentheses, comma, bottom and each relation name)
has length 1, and the k-th variable has length k.  Hence a numeral for m has
length 3m+1.

Besides = and < the language has a few decidable relation symbols standing
for arithmetized primitive recursive relations:

``Halts(i, j, c)``     phi_i(j) halts within c steps
``Out(i, j, c, v)``    phi_i(j) halts within c steps with output v
``Len(x, n)``          x codes a formula of length n
``Dsub(x, y, d)``      d codes D(formula x, y)
``Diag(y, x)``         x codes formula y with the numeral of y put for its free variables
``Smn(i, a, u)``       u = smn(i, a)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Union

# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    depth: int

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("variable depth starts at 1")


@dataclass(frozen=True)
class Succ:
    arg: "Term"

    def __post_init__(self) -> None:
        if isinstance(self.arg, Num):
            raise ValueError("use succ() so numerals stay canonical")


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


Term = Union[Num, Var, Succ, Add, Mul]

ZERO = Num(0)


def numeral(m: int) -> Num:
    if m < 0:
        raise ValueError("numerals denote naturals")
    return Num(m)


def succ(t: Term) -> Term:
    return Num(t.value + 1) if isinstance(t, Num) else Succ(t)


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Less:
    left: Term
    right: Term


RELATIONS = {"Halts": 3, "Out": 4, "Len": 2, "Dsub": 3, "Diag": 2, "Smn": 3}
# position of the argument a functional relation determines from the others
FUNCTIONAL_OUTPUT = {"Len": 1, "Dsub": 2, "Diag": 1, "Smn": 2}


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        if RELATIONS.get(self.name) != len(self.args):
            raise ValueError(f"bad relation {self.name}/{len(self.args)}")


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: int
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: int
    body: "Formula"


@dataclass(frozen=True)
class Bottom:
    pass


BOTTOM = Bottom()

Formula = Union[Eq, Less, Rel, Not, And, Or, Implies, Iff, ForAll, Exists, Bottom]
ATOMS = (Eq, Less, Rel)
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (ForAll, Exists)


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; empty conjunction is ``not bottom``."""
    parts = list(parts)
    if not parts:
        return Not(BOTTOM)
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return BOTTOM
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


# ---------------------------------------------------------------------------
# Length


def term_len(t: Term) -> int:
    if isinstance(t, Num):
        return 3 * t.value + 1
    if isinstance(t, Var):
        return t.depth
    if isinstance(t, Succ):
        return 3 + term_len(t.arg)
    return 3 + term_len(t.left) + term_len(t.right)


def length(phi: Formula | Term) -> int:
    """Symbol length of a term or formula."""
    if isinstance(phi, (Num, Var, Succ, Add, Mul)):
        return term_len(phi)
    if isinstance(phi, (Eq, Less)):
        return 1 + term_len(phi.left) + term_len(phi.right)
    if isinstance(phi, Rel):
        return 2 + sum(term_len(a) for a in phi.args) + len(phi.args)
    if isinstance(phi, Not):
        return 1 + length(phi.body)
    if isinstance(phi, BINARY):
        return 3 + length(phi.left) + length(phi.right)
    if isinstance(phi, QUANTIFIERS):
        return 1 + phi.var + length(phi.body)
    if isinstance(phi, Bottom):
        return 1
    raise TypeError(phi)


# ---------------------------------------------------------------------------
# Variables and substitution


def term_vars(t: Term) -> set[int]:
    if isinstance(t, Num):
        return set()
    if isinstance(t, Var):
        return {t.depth}
    if isinstance(t, Succ):
        return term_vars(t.arg)
    return term_vars(t.left) | term_vars(t.right)


def free_vars(phi: Formula) -> set[int]:
    if isinstance(phi, (Eq, Less)):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Rel):
        out: set[int] = set()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, BINARY):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, QUANTIFIERS):
        return free_vars(phi.body) - {phi.var}
    return set()


def max_var(phi: Formula | Term) -> int:
    if isinstance(phi, (Num, Var, Succ, Add, Mul)):
        return max(term_vars(phi), default=0)
    if isinstance(phi, (Eq, Less)):
        return max(max_var(phi.left), max_var(phi.right))
    if isinstance(phi, Rel):
        return max((max_var(a) for a in phi.args), default=0)
    if isinstance(phi, Not):
        return max_var(phi.body)
    if isinstance(phi, BINARY):
        return max(max_var(phi.left), max_var(phi.right))
    if isinstance(phi, QUANTIFIERS):
        return max(phi.var, max_var(phi.body))
    return 0


def fresh_var(*things: Formula | Term) -> int:
    return max((max_var(t) for t in things), default=0) + 1


def subst_term(t: Term, mapping: dict[int, Term]) -> Term:
    if isinstance(t, Num):
        return t
    if isinstance(t, Var):
        return mapping.get(t.depth, t)
    if isinstance(t, Succ):
        return succ(subst_term(t.arg, mapping))
    return type(t)(subst_term(t.left, mapping), subst_term(t.right, mapping))


def subst(phi: Formula, mapping: dict[int, Term]) -> Formula:
    """Capture-avoiding simultaneous substitution for free variables."""
    if not mapping:
        return phi
    if isinstance(phi, (Eq, Less)):
        return type(phi)(subst_term(phi.left, mapping), subst_term(phi.right, mapping))
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(subst_term(a, mapping) for a in phi.args))
    if isinstance(phi, Not):
        return Not(subst(phi.body, mapping))
    if isinstance(phi, BINARY):
        return type(phi)(subst(phi.left, mapping), subst(phi.right, mapping))
    if isinstance(phi, QUANTIFIERS):
        fv = free_vars(phi.body)
        inner = {v: t for v, t in mapping.items() if v != phi.var and v in fv}
        if not inner:
            return phi
        incoming = set().union(*(term_vars(t) for t in inner.values()))
        var, body = phi.var, phi.body
        if var in incoming:
            new = max([max_var(phi)] + [max_var(t) for t in inner.values()]) + 1
            body = subst(body, {var: Var(new)})
            var = new
        return type(phi)(var, subst(body, inner))
    return phi


def substitutable(phi: Formula, var: int, t: Term) -> bool:
    """No free occurrence of ``var`` in ``phi`` lies under a binder of a variable of ``t``."""
    tv = term_vars(t)

    def walk(f: Formula, bound: frozenset[int]) -> bool:
        if isinstance(f, ATOMS):
            return not (var in free_vars(f) and bound & tv)
        if isinstance(f, Not):
            return walk(f.body, bound)
        if isinstance(f, BINARY):
            return walk(f.left, bound) and walk(f.right, bound)
        if isinstance(f, QUANTIFIERS):
            if f.var == var:
                return True
            return walk(f.body, bound | {f.var})
        return True

    return walk(phi, frozenset())


# ---------------------------------------------------------------------------
# Canonical s-expressions


def term_sexpr(t: Term) -> str:
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, Var):
        return f"v{t.depth}"
    if isinstance(t, Succ):
        return f"(s {term_sexpr(t.arg)})"
    op = "+" if isinstance(t, Add) else "*"
    return f"({op} {term_sexpr(t.left)} {term_sexpr(t.right)})"


_BIN_NAMES = {And: "and", Or: "or", Implies: "imp", Iff: "iff"}
_Q_NAMES = {ForAll: "all", Exists: "ex"}


def to_sexpr(phi: Formula) -> str:
    if isinstance(phi, Eq):
        return f"(= {term_sexpr(phi.left)} {term_sexpr(phi.right)})"
    if isinstance(phi, Less):
        return f"(< {term_sexpr(phi.left)} {term_sexpr(phi.right)})"
    if isinstance(phi, Rel):
        return "(" + " ".join([phi.name, *map(term_sexpr, phi.args)]) + ")"
    if isinstance(phi, Not):
        return f"(not {to_sexpr(phi.body)})"
    if isinstance(phi, BINARY):
        return f"({_BIN_NAMES[type(phi)]} {to_sexpr(phi.left)} {to_sexpr(phi.right)})"
    if isinstance(phi, QUANTIFIERS):
        return f"({_Q_NAMES[type(phi)]} v{phi.var} {to_sexpr(phi.body)})"
    if isinstance(phi, Bottom):
        return "bot"
    raise TypeError(phi)


class ParseError(ValueError):
    pass


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise ParseError("unexpected end")
    tok = tokens[pos]
    if tok == ")":
        raise ParseError("unexpected )")
    if tok != "(":
        return tok, pos + 1
    items = []
    pos += 1
    while True:
        if pos >= len(tokens):
            raise ParseError("unclosed (")
        if tokens[pos] == ")":
            return items, pos + 1
        item, pos = _read(tokens, pos)
        items.append(item)


def _var(tok) -> int:
    if not isinstance(tok, str) or not tok.startswith("v") or not tok[1:].isdigit():
        raise ParseError(f"expected variable, got {tok!r}")
    k = int(tok[1:])
    if k < 1 or tok[1] == "0":
        raise ParseError(f"bad variable {tok!r}")
    return k


def _term(x) -> Term:
    if isinstance(x, str):
        if x.isdigit() and (x == "0" or x[0] != "0"):
            return Num(int(x))
        return Var(_var(x))
    if len(x) == 2 and x[0] == "s":
        inner = _term(x[1])
        if isinstance(inner, Num):
            raise ParseError("non-canonical numeral")
        return Succ(inner)
    if len(x) == 3 and x[0] in ("+", "*"):
        return (Add if x[0] == "+" else Mul)(_term(x[1]), _term(x[2]))
    raise ParseError(f"bad term {x!r}")


_BIN_BY_NAME = {v: k for k, v in _BIN_NAMES.items()}
_Q_BY_NAME = {v: k for k, v in _Q_NAMES.items()}


def _formula(x) -> Formula:
    if x == "bot":
        return BOTTOM
    if not isinstance(x, list) or not x or not isinstance(x[0], str):
        raise ParseError(f"bad formula {x!r}")
    head, rest = x[0], x[1:]
    if head in ("=", "<") and len(rest) == 2:
        return (Eq if head == "=" else Less)(_term(rest[0]), _term(rest[1]))
    if head in RELATIONS:
        if len(rest) != RELATIONS[head]:
            raise ParseError(f"arity of {head}")
        return Rel(head, tuple(_term(a) for a in rest))
    if head == "not" and len(rest) == 1:
        return Not(_formula(rest[0]))
    if head in _BIN_BY_NAME and len(rest) == 2:
        return _BIN_BY_NAME[head](_formula(rest[0]), _formula(rest[1]))
    if head in _Q_BY_NAME and len(rest) == 2:
        return _Q_BY_NAME[head](_var(rest[0]), _formula(rest[1]))
    raise ParseError(f"bad formula {x!r}")


def parse_sexpr(text: str) -> Formula:
    tokens = _tokenize(text)
    tree, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ParseError("trailing input")
    return _formula(tree)


def parse_term(text: str) -> Term:
    tokens = _tokenize(text)
    tree, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ParseError("trailing input")
    return _term(tree)


# ---------------------------------------------------------------------------
# Human-readable rendering


def _vname(k: int) -> str:
    return "x" + "′" * (k - 1)


def term_text(t: Term) -> str:
    if isinstance(t, Num):
        return str(t.value) if t.value < 10**6 else f"#{t.value.bit_length()}b"
    if isinstance(t, Var):
        return _vname(t.depth)
    if isinstance(t, Succ):
        return f"s({term_text(t.arg)})"
    op = "+" if isinstance(t, Add) else "·"
    return f"({term_text(t.left)}{op}{term_text(t.right)})"


_SYM = {And: "∧", Or: "∨", Implies: "→", Iff: "↔"}


def to_text(phi: Formula) -> str:
    if isinstance(phi, Eq):
        return f"{term_text(phi.left)}={term_text(phi.right)}"
    if isinstance(phi, Less):
        return f"{term_text(phi.left)}<{term_text(phi.right)}"
    if isinstance(phi, Rel):
        return f"{phi.name}(" + ",".join(map(term_text, phi.args)) + ")"
    if isinstance(phi, Not):
        return "¬" + to_text(phi.body)
    if isinstance(phi, BINARY):
        return f"({to_text(phi.left)}{_SYM[type(phi)]}{to_text(phi.right)})"
    if isinstance(phi, ForAll):
        return f"∀{_vname(phi.var)}{to_text(phi.body)}"
    if isinstance(phi, Exists):
        return f"∃{_vname(phi.var)}{to_text(phi.body)}"
    return "⊥"


# ---------------------------------------------------------------------------
# JSON AST


def term_to_json(t: Term):
    if isinstance(t, Num):
        return {"num": str(t.value)}
    if isinstance(t, Var):
        return {"var": t.depth}
    if isinstance(t, Succ):
        return {"s": term_to_json(t.arg)}
    return {"+" if isinstance(t, Add) else "*": [term_to_json(t.left), term_to_json(t.right)]}


def to_json(phi: Formula):
    if isinstance(phi, (Eq, Less)):
        return {"op": "=" if isinstance(phi, Eq) else "<", "args": [term_to_json(phi.left), term_to_json(phi.right)]}
    if isinstance(phi, Rel):
        return {"op": phi.name, "args": [term_to_json(a) for a in phi.args]}
    if isinstance(phi, Not):
        return {"op": "not", "args": [to_json(phi.body)]}
    if isinstance(phi, BINARY):
        return {"op": _BIN_NAMES[type(phi)], "args": [to_json(phi.left), to_json(phi.right)]}
    if isinstance(phi, QUANTIFIERS):
        return {"op": _Q_NAMES[type(phi)], "var": phi.var, "args": [to_json(phi.body)]}
    return {"op": "bot", "args": []}


def term_from_json(d) -> Term:
    if "num" in d:
        return Num(int(d["num"]))
    if "var" in d:
        return Var(int(d["var"]))
    if "s" in d:
        return succ(term_from_json(d["s"]))
    key = "+" if "+" in d else "*"
    left, right = d[key]
    return (Add if key == "+" else Mul)(term_from_json(left), term_from_json(right))


def from_json(d) -> Formula:
    op, args = d["op"], d.get("args", [])
    if op in ("=", "<"):
        return (Eq if op == "=" else Less)(term_from_json(args[0]), term_from_json(args[1]))
    if op in RELATIONS:
        return Rel(op, tuple(term_from_json(a) for a in args))
    if op == "not":
        return Not(from_json(args[0]))
    if op in _BIN_BY_NAME:
        return _BIN_BY_NAME[op](from_json(args[0]), from_json(args[1]))
    if op in _Q_BY_NAME:
        return _Q_BY_NAME[op](int(d["var"]), from_json(args[0]))
    if op == "bot":
        return BOTTOM
    raise ParseError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Goedel numbering: the canonical s-expression read as a big-endian byte string


def godel_encode(phi: Formula) -> int:
    return int.from_bytes(b"\x01" + to_sexpr(phi).encode("ascii"), "big")


_decode_cache: dict[int, Formula | None] = {}


def godel_decode(n: int) -> Formula | None:
    if n in _decode_cache:
        return _decode_cache[n]
    out = _godel_decode(n)
    if len(_decode_cache) > 20000:
        _decode_cache.clear()
    _decode_cache[n] = out
    return out


def _godel_decode(n: int) -> Formula | None:
    if n <= 0:
        return None
    raw = n.to_bytes((n.bit_length() + 7) // 8, "big")
    if raw[0] != 1:
        return None
    try:
        text = raw[1:].decode("ascii")
        phi = parse_sexpr(text)
    except (UnicodeDecodeError, ParseError, ValueError):
        return None
    return phi if to_sexpr(phi) == text else None


# ---------------------------------------------------------------------------
# Constructors for the sentences of the constructions


def _enum_index(theory_or_index) -> int:
    if isinstance(theory_or_index, int):
        return theory_or_index
    return theory_or_index.enumerator


def halt_formula(i: int, j: int) -> Formula:
    """The Sigma_1 sentence "phi_i(j) halts": exists c Halts(i, j, c)."""
    return Exists(1, Rel("Halts", (Num(i), Num(j), Var(1))))


def nonhalt_formula(i: int, j: int) -> Formula:
    return Not(halt_formula(i, j))


def output_formula(j: int) -> Formula:
    """"phi_j(0) halts with output x": exists c Out(j, 0, c, x), x the first variable."""
    return Exists(2, Rel("Out", (Num(j), ZERO, Var(2), Var(1))))


def k_compare_formula(w: int, e: int, direction: str) -> Formula:
    """ "K(w) <= e" or its negation "K(w) > e".

    K(w) <= e is  exists z (z < e+1 and exists c Out(z, 0, c, w)).
    """
    le = Exists(1, And(Less(Var(1), Num(e + 1)), Exists(2, Rel("Out", (Var(1), ZERO, Var(2), Num(w))))))
    if direction in ("<=", "≤", "le"):
        return le
    if direction in (">", "gt"):
        return Not(le)
    raise ValueError(f"direction must be '<=' or '>', got {direction!r}")


def parse_k_greater(code: int) -> tuple[int, int] | None:
    """``(w, e)`` when ``code`` is the code of "K(w) > e", else None."""
    phi = godel_decode(code)
    if not (isinstance(phi, Not) and isinstance(phi.body, Exists)):
        return None
    body = phi.body.body
    if not (isinstance(body, And) and isinstance(body.left, Less)):
        return None
    bound = body.left.right
    inner = body.right
    if not (isinstance(bound, Num) and bound.value >= 1 and isinstance(inner, Exists)):
        return None
    rel = inner.body
    if not (isinstance(rel, Rel) and rel.name == "Out" and isinstance(rel.args[3], Num)):
        return None
    w, e = rel.args[3].value, bound.value - 1
    return (w, e) if k_compare_formula(w, e, ">") == phi else None


def d_formula(psi: Formula, n: int) -> Formula:
    """D(psi, n) = forall x [psi(x, ..., x) <-> x = n]."""
    x = Var(1)
    body = subst(psi, {v: x for v in free_vars(psi)})
    return ForAll(1, Iff(body, Eq(x, Num(n))))


def pr_formula(theory, arg: Term) -> Formula:
    """Pr_T(arg): some stage of T's theorem enumerator outputs ``arg``."""
    e = _enum_index(theory)
    k = fresh_var(arg)
    return Exists(k, Exists(k + 1, Rel("Out", (Num(e), Var(k), Var(k + 1), arg))))


def con_formula(theory) -> Formula:
    return Not(pr_formula(theory, Num(godel_encode(BOTTOM))))


def def_formula(theory, bound: Term, arg: Term) -> Formula:
    """Def_T^{<bound}(arg): some formula shorter than ``bound`` defines ``arg`` in T."""
    w = fresh_var(bound, arg)
    n, d = w + 1, w + 2
    short = Exists(n, And(Rel("Len", (Var(w), Var(n))), Less(Var(n), bound)))
    provable = Exists(d, And(Rel("Dsub", (Var(w), arg, Var(d))), pr_formula(theory, Var(d))))
    return Exists(w, And(short, provable))


def berry_formula(theory, bound: Term, arg: Term) -> Formula:
    """Berry_T^{<bound}(arg): arg is the least number not definable below ``bound``."""
    y = fresh_var(bound, arg)
    return And(
        Not(def_formula(theory, bound, arg)),
        ForAll(y, Implies(Less(Var(y), arg), def_formula(theory, bound, Var(y)))),
    )


def berry_template(theory) -> Formula:
    """Berry_T^{<x'}(x) with x' the second and x the first variable."""
    return berry_formula(theory, Var(2), Var(1))


def ell(theory) -> int:
    return length(berry_template(theory))


def boolos_formula(theory) -> Formula:
    """Boolos_T(x) = exists x' [x' = 5*ell_T and Berry_T^{<x'}(x)]."""
    berry = berry_template(theory)
    five_ell = Mul(Num(5), Num(length(berry)))
    return Exists(2, And(Eq(Var(2), five_ell), berry))


# ---------------------------------------------------------------------------
# Semantics of the functional relation symbols


def diagonalize(y: int) -> int | None:
    phi = godel_decode(y)
    if phi is None:
        return None
    return godel_encode(subst(phi, {v: Num(y) for v in free_vars(phi)}))


def relation_output(name: str, inputs: tuple[int, ...]) -> int | None:
    """The value a functional relation assigns to its output slot, if any."""
    if name == "Len":
        phi = godel_decode(inputs[0])
        return None if phi is None else length(phi)
    if name == "Dsub":
        phi = godel_decode(inputs[0])
        return None if phi is None else godel_encode(d_formula(phi, inputs[1]))
    if name == "Diag":
        return diagonalize(inputs[0])
    if name == "Smn":
        from .machine import smn

        return smn(inputs[0], inputs[1])
    raise ValueError(name)


def closed_term_value(t: Term) -> int:
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Succ):
        return closed_term_value(t.arg) + 1
    if isinstance(t, Add):
        return closed_term_value(t.left) + closed_term_value(t.right)
    if isinstance(t, Mul):
        return closed_term_value(t.left) * closed_term_value(t.right)
    raise ValueError("term has free variables")


def dumps(phi: Formula) -> str:
    return json.dumps(to_json(phi), sort_keys=True)
