"""A tiny equational language for loop identities.

Identities are written with explicit ``*`` and parentheses, e.g.
``((x*y)*z)*y = x*(y*(z*y))``.  Each side is a binary tree over single-letter
variables.  Besides brute-force checking on a finite loop, a side that uses a
chosen variable exactly once can be read as a composite translation applied
to that variable; :func:`compile_translation_word` produces that reading.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import DSLSyntaxError, EmptySide, LoopModError, NonlinearPoint, UnboundVariable, UnknownBuiltin
from .loop import LEFT, RIGHT, LoopTable, Permutation, compose, translation


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Mul:
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"({self.left}*{self.right})"


Term = Union[Var, Mul]


def term_str(t: Term) -> str:
    """Fully parenthesized text with the outermost pair dropped."""
    s = str(t)
    return s[1:-1] if isinstance(t, Mul) else s


def variables_of(t: Term) -> list[str]:
    """Variables in order of first appearance."""
    out: list[str] = []

    def walk(node):
        if isinstance(node, Var):
            if node.name not in out:
                out.append(node.name)
        else:
            walk(node.left)
            walk(node.right)

    walk(t)
    return out


def occurrences(t: Term, name: str) -> int:
    if isinstance(t, Var):
        return int(t.name == name)
    return occurrences(t.left, name) + occurrences(t.right, name)


@dataclass(frozen=True)
class IdentityAst:
    lhs: Term
    rhs: Term
    variables: tuple[str, ...]

    def __str__(self) -> str:
        return f"{term_str(self.lhs)} = {term_str(self.rhs)}"


def make_identity(lhs: Term, rhs: Term) -> IdentityAst:
    names = variables_of(lhs) + [v for v in variables_of(rhs) if v not in variables_of(lhs)]
    return IdentityAst(lhs, rhs, tuple(sorted(names)))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise DSLSyntaxError(f"expected {ch!r}, found {got!r}", self._offset())
        self.pos += 1

    def _offset(self) -> int:
        return len(self.text[: self.pos].encode("utf-8"))

    def term(self) -> Term:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            left = self.term()
            self.expect("*")
            right = self.term()
            self.expect(")")
            return Mul(left, right)
        if len(ch) == 1 and "a" <= ch <= "z":
            self.pos += 1
            return Var(ch)
        got = ch or "end of input"
        raise DSLSyntaxError(f"expected a variable or '(', found {got!r}", self._offset())

    def side(self, stop: str) -> Term:
        if self.peek() == stop:
            raise EmptySide(f"empty side of identity at offset {self._offset()}")
        t = self.term()
        if self.peek() == "*":
            self.pos += 1
            t = Mul(t, self.term())
        return t


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.side("")
    if p.peek():
        raise DSLSyntaxError(f"unexpected {p.peek()!r}", p._offset())
    return t


def parse_identity(text: str) -> IdentityAst:
    """Parse ``term = term``.  Grouping must be explicit except for a single top-level product."""
    p = _Parser(text)
    lhs = p.side("=")
    p.expect("=")
    rhs = p.side("")
    if p.peek():
        raise DSLSyntaxError(f"unexpected {p.peek()!r}", p._offset())
    return make_identity(lhs, rhs)


BUILTINS = {
    "associativity": "(x*y)*z = x*(y*z)",
    "kunen": "((x*y)*z)*y = x*(y*(z*y))",
    "moufang-right": "((x*y)*z)*y = x*(y*(z*y))",
    "moufang-left": "x*(y*(x*z)) = ((x*y)*x)*z",
    "left-bol": "x*(y*(x*z)) = (x*(y*x))*z",
    "right-bol": "((z*x)*y)*x = z*((x*y)*x)",
    "flexible": "x*(y*x) = (x*y)*x",
}


def builtin(name: str) -> IdentityAst:
    try:
        return parse_identity(BUILTINS[name])
    except KeyError:
        raise UnknownBuiltin(f"unknown identity {name!r}; choose from {', '.join(BUILTINS)}") from None


def evaluate(L: LoopTable, t: Term, assignment: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return assignment[t.name]
        except KeyError:
            raise UnboundVariable(f"variable {t.name!r} has no value") from None
    return L.table[evaluate(L, t.left, assignment)][evaluate(L, t.right, assignment)]


@dataclass(frozen=True)
class Counterexample:
    assignment: dict
    lhs: int
    rhs: int


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: Counterexample | None = None
    cases: int = 0


def _compile_eval(t: Term, names: tuple[str, ...]):
    """Turn a term into a function of a value tuple ordered like ``names``."""
    if isinstance(t, Var):
        i = names.index(t.name)
        return lambda table, vals: vals[i]
    f, g = _compile_eval(t.left, names), _compile_eval(t.right, names)
    return lambda table, vals: table[f(table, vals)][g(table, vals)]


def check_identity(L: LoopTable, ident: IdentityAst) -> Verdict:
    """Exhaustive check over all assignments, stopping at the first lexicographic counterexample."""
    names = ident.variables
    lhs = _compile_eval(ident.lhs, names)
    rhs = _compile_eval(ident.rhs, names)
    table = L.table
    cases = 0
    for vals in itertools.product(range(L.order), repeat=len(names)):
        cases += 1
        u, v = lhs(table, vals), rhs(table, vals)
        if u != v:
            return Verdict(False, Counterexample(dict(zip(names, vals)), u, v), cases)
    return Verdict(True, None, cases)


@dataclass(frozen=True)
class TranslationWord:
    """``factors[0] ∘ factors[1] ∘ ...`` applied to ``point``.

    Each factor is ``(side, parameter)`` where the parameter is a term free of
    the point variable; ``(left, c)`` is ``z ↦ c*z`` and ``(right, c)`` is
    ``z ↦ z*c``.
    """

    factors: tuple[tuple[str, Term], ...]
    point: str

    def __str__(self) -> str:
        if not self.factors:
            return "id"
        return " ∘ ".join(f"{'L' if s == LEFT else 'R'}[{term_str(t)}]" for s, t in self.factors)


def compile_translation_word(side: Term, point: str) -> TranslationWord:
    k = occurrences(side, point)
    if k != 1:
        raise NonlinearPoint(point, k)
    factors = []
    node = side
    while isinstance(node, Mul):
        if occurrences(node.right, point):
            factors.append((LEFT, node.left))
            node = node.right
        else:
            factors.append((RIGHT, node.right))
            node = node.left
    return TranslationWord(tuple(factors), point)


def evaluate_word(L: LoopTable, w: TranslationWord, assignment: Mapping[str, int]) -> Permutation:
    perms = [translation(L, s, evaluate(L, t, assignment)) for s, t in w.factors]
    if not perms:
        return Permutation.identity(L.order)
    return compose(*perms)


def linear_variables(ident: IdentityAst) -> list[str]:
    return [v for v in ident.variables if occurrences(ident.lhs, v) == 1 and occurrences(ident.rhs, v) == 1]


def default_point(ident: IdentityAst) -> str:
    """Last variable (alphabetically) that occurs exactly once on each side."""
    lin = linear_variables(ident)
    if not lin:
        raise NonlinearPoint(ident.variables[-1] if ident.variables else "?", 0)
    return lin[-1]


def compile_identity(ident: IdentityAst, point: str | None = None) -> tuple[TranslationWord, TranslationWord]:
    if point is None:
        point = default_point(ident)
    if point not in ident.variables:
        raise LoopModError(f"point variable {point!r} does not occur in the identity")
    return compile_translation_word(ident.lhs, point), compile_translation_word(ident.rhs, point)
