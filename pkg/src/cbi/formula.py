"""CBI formula syntax: the thirteen constructors, a precedence-climbing parser,
renderers for ASCII / unicode / LaTeX, and small structural utilities.

The tokenizer and parser are shared with the modal and structure grammars,
which extend the same operator table with a few extra tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Union


class Formula:
    """Base class of every formula node (CBI and modal)."""

    __slots__ = ("_hash",)  # cached by typed_hash; not a dataclass field

    def children(self) -> tuple["Formula", ...]:
        return ()


@dataclass(frozen=True, slots=True)
class Var(Formula):
    name: str

    def __post_init__(self) -> None:
        if not _IDENT.fullmatch(self.name):
            raise ValueError(f"invalid propositional variable name {self.name!r}")


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    pass


@dataclass(frozen=True, slots=True)
class MTop(Formula):
    pass


@dataclass(frozen=True, slots=True)
class MBot(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class MNot(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Imp(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Star(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Par(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Wand(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


def typed_hash(self) -> int:
    # the generated dataclass hash ignores the class, so Not(P) and MNot(P) would collide;
    # cached because memo tables hash deep trees repeatedly
    try:
        return self._hash
    except AttributeError:
        h = hash((type(self).__name__,) + tuple(getattr(self, n) for n in self.__slots__))
        object.__setattr__(self, "_hash", h)
        return h


TOP, BOT, MTOP, MBOT = Top(), Bot(), MTop(), MBot()

UNARY = (Not, MNot)
BINARY = (And, Or, Imp, Star, Par, Wand)
CBI_TYPES = (Var, Top, Bot, MTop, MBot, Not, MNot, And, Or, Imp, Star, Par, Wand)
for _cls in CBI_TYPES:
    _cls.__hash__ = typed_hash


def Iff(f: Formula, g: Formula) -> Formula:
    return And(Imp(f, g), Imp(g, f))


def rebuild(f: Formula, children: tuple[Formula, ...]) -> Formula:
    """A node of the same kind as `f` with new children."""
    if not children:
        return f
    return type(f)(*children)


# ---------------------------------------------------------------- utilities

def iter_subterms(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children()))


def size(f: Formula) -> int:
    return sum(1 for _ in iter_subterms(f))


def variables(f: Formula) -> frozenset[str]:
    """Names of the propositional variables occurring in `f`."""
    return frozenset(g.name for g in iter_subterms(f) if isinstance(g, Var))


def subformulas(f: Formula) -> frozenset[Formula]:
    return frozenset(iter_subterms(f))


def substitute(f: Formula, p: str, g: Formula) -> Formula:
    """f[g/p]: replace every occurrence of Var(p) by g."""
    if isinstance(f, Var):
        return g if f.name == p else f
    kids = f.children()
    if not kids:
        return f
    return rebuild(f, tuple(substitute(k, p, g) for k in kids))


def map_formula(f: Formula, fn: Callable[[Formula, tuple], Formula]) -> Formula:
    """Bottom-up fold: fn receives the original node and its mapped children."""
    return fn(f, tuple(map_formula(k, fn) for k in f.children()))


# ---------------------------------------------------------------- grammar

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


class FormulaSyntaxError(ValueError):
    """Parse failure carrying a UTF-8 byte offset and the expected-token set."""

    def __init__(self, text: str, pos: int, expected: set[str], found: str):
        self.offset = len(text[:pos].encode("utf-8"))
        self.expected = frozenset(expected)
        self.found = found
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"syntax error at byte {self.offset}: found {found}, expected one of: {exp}")


@dataclass(frozen=True)
class Token:
    kind: str  # canonical token name, e.g. "&", "ident", "eof"
    text: str
    pos: int


# canonical token -> surface spellings (ASCII first, then unicode aliases)
_LITERALS: dict[str, tuple[str, ...]] = {
    "(": ("(",),
    ")": (")",),
    "!": ("!", "¬"),
    "~": ("~", "∼"),
    "&": ("&", "∧"),
    "|": ("|", "∨"),
    "|*": ("|*", "⅋"),
    "->": ("->", "→"),
    "<->": ("<->", "↔"),
    "*": ("*", "∗"),
    "-*": ("-*", "—∗", "—*", "−∗"),
    "top": ("⊤",),
    "bot": ("⊥",),
    "emp": ("⊤*",),
    "coemp": ("⊥*",),
}
_KEYWORDS = {"top", "bot", "emp", "coemp"}

_MODAL_LITERALS: dict[str, tuple[str, ...]] = {
    "-.": ("-.", "−"),
    "o": ("∘",),
    "o-": ("⊸",),
    "INF": ("∞",),
}
_MODAL_KEYWORDS = {"E", "INF"}

_STRUCT_LITERALS: dict[str, tuple[str, ...]] = {
    "#": ("#", "♯"),
    "%": ("%", "♭"),
    ";": (";",),
    ",": (",",),
    "|-": ("|-", "⊢"),
    "AE": ("∅",),
    "ME": ("⊘",),
}
_STRUCT_KEYWORDS = {"AE", "ME"}


@dataclass(frozen=True)
class Dialect:
    modal: bool = False
    structural: bool = False

    def literal_table(self) -> list[tuple[str, str]]:
        table: dict[str, tuple[str, ...]] = dict(_LITERALS)
        if self.modal:
            table.update(_MODAL_LITERALS)
        if self.structural:
            table.update(_STRUCT_LITERALS)
        pairs = [(spelling, kind) for kind, spellings in table.items() for spelling in spellings]
        pairs.sort(key=lambda p: -len(p[0]))
        return pairs

    def keywords(self) -> set[str]:
        kw = set(_KEYWORDS)
        if self.modal:
            kw |= _MODAL_KEYWORDS | {"o"}
        if self.structural:
            kw |= _STRUCT_KEYWORDS
        return kw


CBI = Dialect()


def tokenize(text: str, dialect: Dialect = CBI) -> list[Token]:
    table = dialect.literal_table()
    keywords = dialect.keywords()
    out: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group()
            end = m.end()
            if dialect.modal and word == "o":
                # `o-` is the co-wand unless the dash starts `->`, `-*` or `-.`
                if text.startswith("-", end) and not text.startswith(("->", "-*", "-."), end):
                    out.append(Token("o-", "o-", i))
                    i = end + 1
                    continue
                out.append(Token("o", "o", i))
            elif word in keywords:
                out.append(Token(word, word, i))
            else:
                out.append(Token("ident", word, i))
            i = end
            continue
        for spelling, kind in table:
            if text.startswith(spelling, i):
                out.append(Token(kind, spelling, i))
                i += len(spelling)
                break
        else:
            raise FormulaSyntaxError(text, i, {"token"}, repr(ch))
    out.append(Token("eof", "", n))
    return out


# binding power and associativity of binary operators; prefix operators bind at 8
_BINARY_OPS: dict[str, tuple[int, str]] = {
    "<->": (1, "right"),
    "->": (2, "right"),
    "-*": (3, "right"),
    "|": (4, "left"),
    "|*": (5, "left"),
    "&": (6, "left"),
    "*": (7, "left"),
    "o": (7, "left"),
    "o-": (7, "left"),
    ";": (0, "left"),
    ",": (0, "left"),
}
PREFIX_POWER = 8
_PREFIX = {"!", "~", "-.", "#", "%"}
_ATOMS = {"ident", "top", "bot", "emp", "coemp", "E", "INF", "AE", "ME"}


class Parser:
    """Precedence-climbing parser over a token list.

    `build_binary`, `build_prefix` and `build_atom` turn operator tokens into
    nodes, so the same loop serves formulas, modal formulas and structures.
    """

    def __init__(self, text: str, dialect: Dialect, build_atom, build_prefix, build_binary,
                 stop: frozenset[str] = frozenset()):
        self.text = text
        self.tokens = tokenize(text, dialect)
        self.i = 0
        self.dialect = dialect
        self.build_atom = build_atom
        self.build_prefix = build_prefix
        self.build_binary = build_binary
        self.stop = stop
        kw = dialect.keywords()
        self.atom_kinds = {k for k in _ATOMS if k == "ident" or k in kw}
        self.prefix_kinds = {k for k in _PREFIX if self._known(k)}
        self.binary_kinds = {k for k in _BINARY_OPS if self._known(k)}

    def _known(self, kind: str) -> bool:
        if kind in ("-.", "o", "o-"):
            return self.dialect.modal
        if kind in ("#", "%", ";", ","):
            return self.dialect.structural
        return True

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, expected: set[str]) -> FormulaSyntaxError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return FormulaSyntaxError(self.text, t.pos, expected, found)

    def operand_expected(self) -> set[str]:
        return self.atom_kinds | self.prefix_kinds | {"("}

    def parse_expr(self, min_power: int = 0):
        left = self.parse_prefixed()
        while True:
            kind = self.tok.kind
            if kind not in self.binary_kinds:
                break
            power, assoc = _BINARY_OPS[kind]
            if power < min_power:
                break
            self.i += 1
            right = self.parse_expr(power + 1 if assoc == "left" else power)
            left = self.build_binary(kind, left, right)
        return left

    def parse_prefixed(self):
        t = self.tok
        if t.kind in self.prefix_kinds:
            self.i += 1
            return self.build_prefix(t.kind, self.parse_prefixed())
        if t.kind == "(":
            self.i += 1
            inner = self.parse_expr(0)
            if self.tok.kind != ")":
                raise self.error(self.binary_kinds | {")"})
            self.i += 1
            return inner
        if t.kind in self.atom_kinds:
            self.i += 1
            return self.build_atom(t)
        raise self.error(self.operand_expected())

    def parse_all(self):
        result = self.parse_expr(0)
        if self.tok.kind not in ("eof",) and self.tok.kind not in self.stop:
            raise self.error(self.binary_kinds | {"end of input"} | set(self.stop))
        return result


MACROS: dict[str, str] = {
    # nonconservativity witnesses
    "I": "!emp -* bot",
    "J": "top * (emp & !(P -* !(!emp -* bot)))",
    # partial-functional separation witnesses
    "K": "!(!coemp -* !emp)",
    "L": "!coemp -* emp",
}

_CBI_BINARY = {"&": And, "|": Or, "->": Imp, "*": Star, "|*": Par, "-*": Wand}
_CBI_CONSTS = {"top": TOP, "bot": BOT, "emp": MTOP, "coemp": MBOT}


def _cbi_atom(macros: Mapping[str, Formula] | None):
    def build(t: Token) -> Formula:
        if t.kind == "ident":
            if macros and t.text in macros:
                return macros[t.text]
            return Var(t.text)
        return _CBI_CONSTS[t.kind]
    return build


def _cbi_prefix(kind: str, arg: Formula) -> Formula:
    return Not(arg) if kind == "!" else MNot(arg)


def _cbi_binary(kind: str, left: Formula, right: Formula) -> Formula:
    if kind == "<->":
        return Iff(left, right)
    return _CBI_BINARY[kind](left, right)


def expand_macros(names: Mapping[str, str] = MACROS) -> dict[str, Formula]:
    return {k: parse_formula(v) for k, v in names.items()}


def parse_formula(text: str, macros: Mapping[str, Formula] | None = None) -> Formula:
    """Parse a CBI formula; `macros` maps identifiers to formulas substituted verbatim."""
    p = Parser(text, CBI, _cbi_atom(macros), _cbi_prefix, _cbi_binary)
    return p.parse_all()


# ---------------------------------------------------------------- rendering

_BIN_SYMBOLS = {
    # class: (precedence key, ascii, unicode, latex)
    And: ("&", "&", "∧", r"\wedge"),
    Or: ("|", "|", "∨", r"\vee"),
    Imp: ("->", "->", "→", r"\rightarrow"),
    Star: ("*", "*", "∗", "*"),
    Par: ("|*", "|*", "⅋", r"\mathbin{\rotatebox[origin=c]{180}{\&}}"),
    Wand: ("-*", "-*", "—∗", r"\mathrel{\hbox{---}\llap{$\ast$}}"),
}
_UN_SYMBOLS = {
    Not: ("!", "¬", r"\neg "),
    MNot: ("~", "∼", r"\sim "),
}
_CONST_SYMBOLS = {
    Top: ("top", "⊤", r"\top"),
    Bot: ("bot", "⊥", r"\bot"),
    MTop: ("emp", "⊤*", r"\top^*"),
    MBot: ("coemp", "⊥*", r"\bot^*"),
}
_STYLE_INDEX = {"ascii": 0, "unicode": 1, "latex": 2}

# extension points used by the modal module
EXTRA_BINARY: dict[type, tuple[str, str, str, str]] = {}
EXTRA_UNARY: dict[type, tuple[str, str, str]] = {}
EXTRA_CONST: dict[type, tuple[str, str, str]] = {}


def binding_power(f: Formula) -> int:
    """Precedence of the outermost connective; atoms and prefixes bind tightest."""
    entry = _BIN_SYMBOLS.get(type(f)) or EXTRA_BINARY.get(type(f))
    if entry is None:
        return PREFIX_POWER + 1 if not f.children() else PREFIX_POWER
    return _BINARY_OPS[entry[0]][0]


def render(f: Formula, style: str = "ascii") -> str:
    idx = _STYLE_INDEX[style]
    if isinstance(f, Var):
        return f.name
    t = type(f)
    const = _CONST_SYMBOLS.get(t) or EXTRA_CONST.get(t)
    if const is not None:
        return const[idx]
    un = _UN_SYMBOLS.get(t) or EXTRA_UNARY.get(t)
    if un is not None:
        (arg,) = f.children()
        inner = render(arg, style)
        if binding_power(arg) < PREFIX_POWER:
            inner = f"({inner})"
        return un[idx] + inner
    entry = _BIN_SYMBOLS.get(t) or EXTRA_BINARY.get(t)
    if entry is None:
        name = getattr(f, "name", None)  # schema metavariables
        if isinstance(name, str):
            return name
        raise TypeError(f"cannot render {f!r}")
    key = entry[0]
    power, assoc = _BINARY_OPS[key]
    left, right = f.children()
    ls, rs = render(left, style), render(right, style)
    lp, rp = binding_power(left), binding_power(right)
    if lp < power or (lp == power and (assoc == "right" or type(left) is not t)):
        ls = f"({ls})"
    if rp < power or (rp == power and (assoc == "left" or type(right) is not t)):
        rs = f"({rs})"
    return f"{ls} {entry[1 + idx]} {rs}"


FormulaLike = Union[Formula, str]


def as_formula(f: FormulaLike) -> Formula:
    return parse_formula(f) if isinstance(f, str) else f
