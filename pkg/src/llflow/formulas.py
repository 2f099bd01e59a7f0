"""Formulas, polarity, sequents-as-multisets, and process specifications.

Formulas are propositions of the multiplicative-additive fragment of
classical linear logic (no units, no exponentials) kept in negation normal
form: negation appears on atoms only, and the input-side connectives
(`Par`, `With`) only ever arise as duals of `Tensor`/`Plus` trees.

Polarity discipline: atoms, `Tensor` and `Plus` are *outputs*; negated
atoms, `Par` and `With` are *inputs*.  A process specification is a sequent
with exactly one output member; everything else is an input.

Formula instances are interned: build them through the module factories
(:func:`atom`, :func:`natom`, :func:`tensor`, :func:`plus`, :func:`par`,
:func:`wth`) or the parser, and structurally equal formulas are the same
object.  This makes equality, hashing and multiset canonicalization cheap,
which the proof search leans on heavily.

Text syntax (used by the CLI, fixture files and service payloads)::

    formula  :=  term ('+' term)*          --  '+' is Plus, left-associative
    term     :=  factor ('*' factor)*      --  '*' is Tensor, binds tighter
    factor   :=  '~' factor | '(' formula ')' | identifier
    sequent  :=  formula (',' formula)*

`~` is linear negation; `~(A*B)` therefore denotes the Par-form input and
`~A` a negated atom.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .errors import MixedPolarity, MultipleOutputs, NoOutput, ParseError

INPUT = "input"
OUTPUT = "output"

_INTERN: dict = {}


class Formula:
    """Base class for interned MALL formulas.

    Instances compare by identity (safe because of interning) and carry a
    canonical structural key used for the total order on formulas:
    connective tag first, then children, with atom names compared
    lexicographically.
    """

    __slots__ = ("key", "names", "pol", "size", "_dual", "_hash")

    key: tuple
    names: frozenset
    pol: Optional[str]
    size: int

    def __eq__(self, other):
        return self is other

    def __ne__(self, other):
        return self is not other

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __le__(self, other):
        return self.key <= other.key

    def __repr__(self):
        return f"<{format_formula(self)}>"

    def __str__(self):
        return format_formula(self)


class Atom(Formula):
    __slots__ = ("name",)


class NegAtom(Formula):
    __slots__ = ("name",)


class _Binary(Formula):
    __slots__ = ("l", "r")


class Tensor(_Binary):
    __slots__ = ()


class Plus(_Binary):
    __slots__ = ()


class Par(_Binary):
    __slots__ = ()


class With(_Binary):
    __slots__ = ()


def _intern_leaf(cls, tag, name):
    key = (tag, name)
    f = _INTERN.get(key)
    if f is None:
        if not name.isidentifier():
            raise ParseError(f"atom name must be an identifier: {name!r}")
        f = cls.__new__(cls)
        f.name = name
        f.key = key
        f.names = frozenset((name,))
        f.pol = OUTPUT if tag == 0 else INPUT
        f.size = 0
        f._dual = None
        f._hash = hash(key)
        _INTERN[key] = f
    return f


_POL_TABLE = {2: OUTPUT, 3: OUTPUT, 4: INPUT, 5: INPUT}


def _intern_binary(cls, tag, l, r):
    key = (tag, l.key, r.key)
    f = _INTERN.get(key)
    if f is None:
        f = cls.__new__(cls)
        f.l = l
        f.r = r
        f.key = key
        f.names = l.names | r.names
        want = _POL_TABLE[tag]
        f.pol = want if (l.pol == want and r.pol == want) else None
        f.size = l.size + r.size + 1
        f._dual = None
        f._hash = hash(key)
        _INTERN[key] = f
    return f


def atom(name: str) -> Formula:
    """Positive atomic resource type."""
    return _intern_leaf(Atom, 0, name)


def natom(name: str) -> Formula:
    """Negated atom: an atomic input."""
    return _intern_leaf(NegAtom, 1, name)


def tensor(l: Formula, r: Formula) -> Formula:
    """Parallel pair of outputs."""
    return _intern_binary(Tensor, 2, l, r)


def plus(l: Formula, r: Formula) -> Formula:
    """Exclusive optional outputs."""
    return _intern_binary(Plus, 3, l, r)


def par(l: Formula, r: Formula) -> Formula:
    """Pair of simultaneous inputs (dual of tensor)."""
    return _intern_binary(Par, 4, l, r)


def wth(l: Formula, r: Formula) -> Formula:
    """Exclusively optional inputs (dual of plus)."""
    return _intern_binary(With, 5, l, r)


def dual(f: Formula) -> Formula:
    """Linear negation via the de Morgan laws; an involution.

    Atoms flip sign, Tensor maps to Par and Plus to With (and back) with
    dualized children.  The result is in negation normal form.
    """
    d = f._dual
    if d is not None:
        return d
    if isinstance(f, Atom):
        d = natom(f.name)
    elif isinstance(f, NegAtom):
        d = atom(f.name)
    elif isinstance(f, Tensor):
        d = par(dual(f.l), dual(f.r))
    elif isinstance(f, Par):
        d = tensor(dual(f.l), dual(f.r))
    elif isinstance(f, Plus):
        d = wth(dual(f.l), dual(f.r))
    else:
        d = plus(dual(f.l), dual(f.r))
    f._dual = d
    d._dual = f
    return d


def polarity(f: Formula) -> str:
    """Classify a formula as ``"input"`` or ``"output"``.

    Raises :class:`MixedPolarity` for trees that mix the two connective
    families (e.g. a Tensor with a negated-atom child); such formulas are
    not valid members of a process specification.
    """
    if f.pol is None:
        raise MixedPolarity(f"formula mixes input and output polarity: {format_formula(f)}")
    return f.pol


def is_output(f: Formula) -> bool:
    return f.pol == OUTPUT


def is_input(f: Formula) -> bool:
    return f.pol == INPUT


def subterm_at(f: Formula, path: Iterable[str]) -> Formula:
    """Resolve a left/right path inside a formula's syntax tree."""
    cur = f
    for step in path:
        if not isinstance(cur, _Binary):
            raise KeyError(f"path step {step!r} descends below a leaf of {format_formula(f)}")
        if step == "left":
            cur = cur.l
        elif step == "right":
            cur = cur.r
        else:
            raise KeyError(f"invalid path step {step!r}")
    return cur


# --------------------------------------------------------------------------
# sequents as multisets


class Sequent:
    """An immutable multiset of formulas in canonical (sorted) order.

    Duplicates are meaningful (a process may need two copies of the same
    resource); member order is not.  Equality is multiset equality.
    """

    __slots__ = ("formulas", "_hash")

    def __init__(self, formulas: Iterable[Formula] = ()):
        fs = sorted(formulas, key=_key_of)
        self.formulas = tuple(fs)
        self._hash = hash(self.formulas)

    def __eq__(self, other):
        return isinstance(other, Sequent) and self.formulas == other.formulas

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.formulas)

    def __len__(self):
        return len(self.formulas)

    def __contains__(self, f):
        return f in self.formulas

    def __repr__(self):
        return f"<|- {format_sequent(self)}>"

    def count(self, f: Formula) -> int:
        return self.formulas.count(f)

    def add(self, *fs: Formula) -> "Sequent":
        return Sequent(self.formulas + fs)

    def without(self, *fs: Formula) -> "Sequent":
        """Remove one occurrence of each given formula."""
        rest = list(self.formulas)
        for f in fs:
            rest.remove(f)  # raises ValueError if absent
        return Sequent(rest)

    def positives(self) -> tuple:
        return tuple(f for f in self.formulas if f.pol == OUTPUT)

    def negatives(self) -> tuple:
        return tuple(f for f in self.formulas if f.pol == INPUT)

    def connective_count(self) -> int:
        return sum(f.size for f in self.formulas)

    def atom_occurrences(self) -> dict:
        """Multiset of atom-name occurrences across all members."""
        counts: dict = {}
        stack = list(self.formulas)
        while stack:
            f = stack.pop()
            if isinstance(f, (Atom, NegAtom)):
                counts[f.name] = counts.get(f.name, 0) + 1
            else:
                stack.append(f.l)
                stack.append(f.r)
        return counts


def _key_of(f: Formula):
    return f.key


def mdiff(a: Iterable[Formula], b: Iterable[Formula]) -> Sequent:
    """Multiset difference ``a - b`` respecting multiplicities."""
    rest = sorted(a, key=_key_of)
    for f in b:
        try:
            rest.remove(f)
        except ValueError:
            pass
    return Sequent(rest)


# --------------------------------------------------------------------------
# process specifications


@dataclass(frozen=True)
class ProcessSpec:
    """A named process: a multiset of inputs plus exactly one output."""

    name: str
    inputs: Sequent
    output: Formula

    def sequent(self) -> Sequent:
        return self.inputs.add(self.output)

    def __str__(self):
        return f"{self.name}: |- {format_sequent(self.sequent())}"


def validate_spec(name: str, s: Sequent) -> ProcessSpec:
    """Check the polarity discipline and split a sequent into a spec.

    Exactly one member must be an output; all others must be inputs.
    Raises :class:`NoOutput`, :class:`MultipleOutputs` or
    :class:`MixedPolarity`.
    """
    outs = []
    ins = []
    for f in s:
        p = polarity(f)
        if p == OUTPUT:
            outs.append(f)
        else:
            ins.append(f)
    if not outs:
        raise NoOutput(f"sequent has no output member: |- {format_sequent(s)}")
    if len(outs) > 1:
        raise MultipleOutputs(
            f"sequent has {len(outs)} output members: |- {format_sequent(s)}"
        )
    return ProcessSpec(name=name, inputs=Sequent(ins), output=outs[0])


# --------------------------------------------------------------------------
# text syntax

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\n\r":
            i += 1
            continue
        if c in "~*+(),":
            tokens.append((c, i))
            i += 1
            continue
        if c in _IDENT_START:
            j = i + 1
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            tokens.append(("ident", i, text[i:j]))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", position=i)
    tokens.append(("end", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.advance()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[0]!r}", position=t[1])
        return t

    def formula(self) -> Formula:
        f = self.term()
        while self.peek()[0] == "+":
            self.advance()
            f = plus(f, self.term())
        return f

    def term(self) -> Formula:
        f = self.factor()
        while self.peek()[0] == "*":
            self.advance()
            f = tensor(f, self.factor())
        return f

    def factor(self) -> Formula:
        t = self.advance()
        if t[0] == "~":
            return dual(self.factor())
        if t[0] == "(":
            f = self.formula()
            self.expect(")")
            return f
        if t[0] == "ident":
            return atom(t[2])
        raise ParseError(f"unexpected token {t[0]!r}", position=t[1])

    def sequent(self) -> Sequent:
        fs = [self.formula()]
        while self.peek()[0] == ",":
            self.advance()
            fs.append(self.formula())
        return Sequent(fs)

    def finish(self, value):
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"trailing input starting with {t[0]!r}", position=t[1])
        return value


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    return p.finish(p.formula())


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    return p.finish(p.sequent())


_PREC_PLUS = 1
_PREC_TENSOR = 2
_PREC_LEAF = 3


def _fmt(f: Formula, parent_prec: int, right_child: bool) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, (NegAtom, Par, With)):
        inner = dual(f)
        if isinstance(inner, Atom):
            return "~" + inner.name
        return "~(" + _fmt(inner, 0, False) + ")"
    if isinstance(f, Tensor):
        op, prec = "*", _PREC_TENSOR
    else:
        op, prec = "+", _PREC_PLUS
    s = _fmt(f.l, prec, False) + op + _fmt(f.r, prec, True)
    if prec < parent_prec or (prec == parent_prec and right_child):
        return "(" + s + ")"
    return s


def format_formula(f: Formula) -> str:
    """Render a formula in the text syntax; inverse of :func:`parse_formula`."""
    return _fmt(f, 0, False)


def format_sequent(s: Sequent) -> str:
    return ", ".join(format_formula(f) for f in s)
