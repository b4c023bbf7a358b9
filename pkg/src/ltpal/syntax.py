"""Concrete formula syntax: lexer, parser and pretty-printer.

Grammar, loosest to tightest binding::

    formula  := or '->' formula | or          (implication, right-assoc)
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '!' unary
              | 'X' unary | 'F' unary | 'G' unary        (temporal only)
              | 'K' '{' agent '}' unary                  (epistemic scope)
              | 'D' '{' agent (',' agent)* '}' unary     (epistemic scope)
              | '[' formula ']' unary                    (announcement scope)
              | primary
    primary  := '(' formula (('U'|'R'|'W') formula)? ')' (binary temporal only
              | atom | 'true' | 'false' | '?'digits       outside epistemic
                                                          scopes)
    atom     := IDENT (':' IDENT)?

Identifiers are runs of letters, digits and underscores; the single letters
K, D, X, F, G, U, R, W and the words true/false are reserved.  A bare
identifier ``p`` abbreviates the atom ``p:p``.  Binary temporal operators
must be parenthesised: ``(f U g)``.  Temporal operators of any kind are
rejected inside K{...}, D{...} and announcement brackets; that violation is
reported as `EpistemicScopeError`, a distinct subclass of `ParseError`.

`pretty` emits a canonical minimal-parenthesis rendering.  Parsing a
pretty-printed formula yields a structurally identical AST, provided the
AST was produced by the parser or by the canonical constructors in
`formulas` (ad-hoc trees such as a temporal conjunction of two plain PAL
leaves print as their canonical equivalent instead).
"""

from __future__ import annotations

import re

from .errors import EpistemicScopeError, ParseError
from .formulas import (
    Announce,
    Dist,
    Formula,
    Knows,
    Next,
    PAnd,
    Placeholder,
    PNot,
    Pal,
    PalFormula,
    Prop,
    TAnd,
    TNot,
    Template,
    TemporalFormula,
    Until,
    bottom,
    future,
    globally,
    is_bottom,
    is_top,
    lift,
    release,
    top,
    weak_until,
)
from .model import Atom

_KEYWORDS = {"K", "D", "X", "F", "G", "U", "R", "W", "true", "false"}
_IDENT_RE = re.compile(r"[A-Za-z0-9_]+")
_DIGITS_RE = re.compile(r"[0-9]+")
_PUNCT = {"(", ")", "[", "]", "{", "}", ",", ":", "!", "&", "|"}


class _Token:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind, value, line, column):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column


def _tokenize(text: str) -> list:
    tokens = []
    line, column = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            column = 1
            continue
        if ch.isspace():
            i += 1
            column += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, line, column))
            i += 1
            column += 1
            continue
        if ch == "-":
            if text[i + 1 : i + 2] == ">":
                tokens.append(_Token("->", "->", line, column))
                i += 2
                column += 2
                continue
            raise ParseError("unexpected character '-'", line, column)
        if ch == "?":
            match = _DIGITS_RE.match(text, i + 1)
            if not match:
                raise ParseError("expected digits after '?'", line, column)
            tokens.append(_Token("placeholder", int(match.group()), line, column))
            width = 1 + len(match.group())
            i += width
            column += width
            continue
        match = _IDENT_RE.match(text, i)
        if match:
            word = match.group()
            kind = word if word in _KEYWORDS else "identifier"
            tokens.append(_Token(kind, word, line, column))
            i += len(word)
            column += len(word)
            continue
        raise ParseError(f"unexpected character {ch!r}", line, column)
    tokens.append(_Token("end", None, line, column))
    return tokens


class _Parser:
    """Recursive descent over the token list.

    `pal_scope` is None while temporal operators are allowed; inside an
    epistemic or announcement scope it holds a description of that scope for
    error messages.  Boolean connectives keep pure PAL operands inside the
    PAL layer, so a formula without temporal operators parses to a single
    PAL tree (lifted once at the very end).
    """

    def __init__(self, text: str, *, allow_placeholders: bool):
        self._tokens = _tokenize(text)
        self._pos = 0
        self._allow_placeholders = allow_placeholders

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _advance(self) -> _Token:
        token = self._tokens[self._pos]
        self._pos += 1
        return token

    def _expect(self, kind: str) -> _Token:
        token = self._peek()
        if token.kind != kind:
            raise ParseError(
                f"unexpected {self._describe(token)}",
                token.line,
                token.column,
                expected={kind},
            )
        return self._advance()

    @staticmethod
    def _describe(token: _Token) -> str:
        if token.kind == "end":
            return "end of input"
        if token.kind == "identifier":
            return f"identifier {token.value!r}"
        if token.kind == "placeholder":
            return f"placeholder ?{token.value}"
        return f"'{token.value}'"

    def parse(self, pal_scope: str | None) -> Formula:
        formula = self._parse_implies(pal_scope)
        tail = self._peek()
        if tail.kind in ("U", "R", "W"):
            raise ParseError(
                f"binary temporal operator '{tail.value}' must appear inside "
                f"parentheses: (f {tail.value} g)",
                tail.line,
                tail.column,
            )
        if tail.kind != "end":
            raise ParseError(
                f"unexpected {self._describe(tail)} after the formula",
                tail.line,
                tail.column,
                expected={"end"},
            )
        return formula

    def _parse_implies(self, pal_scope) -> Formula:
        left = self._parse_or(pal_scope)
        if self._peek().kind == "->":
            self._advance()
            right = self._parse_implies(pal_scope)
            return self._implies(left, right)
        return left

    def _parse_or(self, pal_scope) -> Formula:
        formula = self._parse_and(pal_scope)
        while self._peek().kind == "|":
            self._advance()
            formula = self._or(formula, self._parse_and(pal_scope))
        return formula

    def _parse_and(self, pal_scope) -> Formula:
        formula = self._parse_unary(pal_scope)
        while self._peek().kind == "&":
            self._advance()
            formula = self._and(formula, self._parse_unary(pal_scope))
        return formula

    def _parse_unary(self, pal_scope) -> Formula:
        token = self._peek()
        if token.kind == "!":
            self._advance()
            operand = self._parse_unary(pal_scope)
            if isinstance(operand, PalFormula):
                return PNot(operand)
            return TNot(operand)
        if token.kind in ("X", "F", "G"):
            self._reject_temporal(token, pal_scope)
            self._advance()
            operand = lift(self._parse_unary(pal_scope))
            if token.kind == "X":
                return Next(operand)
            if token.kind == "F":
                return future(operand)
            return globally(operand)
        if token.kind == "K":
            self._advance()
            self._expect("{")
            agent = self._expect("identifier").value
            self._expect("}")
            operand = self._parse_unary(f"the scope of K{{{agent}}}")
            return Knows(agent, operand)
        if token.kind == "D":
            self._advance()
            self._expect("{")
            agents = [self._expect("identifier").value]
            while self._peek().kind == ",":
                self._advance()
                agents.append(self._expect("identifier").value)
            self._expect("}")
            operand = self._parse_unary("the scope of D{...}")
            return Dist(frozenset(agents), operand)
        if token.kind == "[":
            self._advance()
            announced = self._parse_implies("an announcement")
            self._expect("]")
            operand = self._parse_unary("an announcement")
            return Announce(announced, operand)
        return self._parse_primary(pal_scope)

    def _parse_primary(self, pal_scope) -> Formula:
        token = self._peek()
        if token.kind == "(":
            self._advance()
            inner = self._parse_implies(pal_scope)
            middle = self._peek()
            if middle.kind in ("U", "R", "W"):
                self._reject_temporal(middle, pal_scope)
                self._advance()
                right = self._parse_implies(pal_scope)
                self._expect(")")
                left, right = lift(inner), lift(right)
                if middle.kind == "U":
                    return Until(left, right)
                if middle.kind == "R":
                    return release(left, right)
                return weak_until(left, right)
            self._expect(")")
            return inner
        if token.kind == "true":
            self._advance()
            return top()
        if token.kind == "false":
            self._advance()
            return bottom()
        if token.kind == "identifier":
            self._advance()
            if self._peek().kind == ":":
                self._advance()
                class_id = self._expect("identifier").value
                return Prop(Atom(token.value, class_id))
            return Prop(Atom(token.value, token.value))
        if token.kind == "placeholder":
            if not self._allow_placeholders:
                raise ParseError(
                    f"placeholder ?{token.value} is only allowed in templates",
                    token.line,
                    token.column,
                )
            self._advance()
            if token.value < 1:
                raise ParseError(
                    "placeholder indices start at 1", token.line, token.column
                )
            return Placeholder(token.value)
        if token.kind in ("U", "R", "W"):
            raise ParseError(
                f"binary temporal operator '{token.value}' must appear inside "
                f"parentheses: (f {token.value} g)",
                token.line,
                token.column,
            )
        raise ParseError(
            f"unexpected {self._describe(token)}",
            token.line,
            token.column,
            expected={"identifier", "'('", "'['", "'!'", "'true'", "'false'"},
        )

    @staticmethod
    def _reject_temporal(token: _Token, pal_scope) -> None:
        if pal_scope is not None:
            raise EpistemicScopeError(
                f"temporal operator '{token.value}' is not allowed inside {pal_scope}",
                token.line,
                token.column,
            )

    def _and(self, a: Formula, b: Formula) -> Formula:
        if isinstance(a, PalFormula) and isinstance(b, PalFormula):
            return PAnd(a, b)
        return TAnd(lift(a), lift(b))

    def _or(self, a: Formula, b: Formula) -> Formula:
        return self._not(self._and(self._not(a), self._not(b)))

    def _implies(self, a: Formula, b: Formula) -> Formula:
        return self._not(self._and(a, self._not(b)))

    @staticmethod
    def _not(a: Formula) -> Formula:
        if isinstance(a, PalFormula):
            return PNot(a)
        return TNot(a)


def parse_formula(text: str) -> TemporalFormula:
    """Parse a path formula; pure PAL text comes back as a single PAL leaf."""
    return lift(_Parser(text, allow_placeholders=False).parse(None))


def parse_pal_formula(text: str) -> PalFormula:
    """Parse a formula in which temporal operators are rejected outright."""
    formula = _Parser(text, allow_placeholders=False).parse("a PAL formula")
    assert isinstance(formula, PalFormula)
    return formula


def parse_template(text: str) -> Template:
    """Parse a formula with ?k slots; arity is the highest index present."""
    formula = _Parser(text, allow_placeholders=True).parse(None)
    try:
        return Template.from_skeleton(lift(formula))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# Pretty-printing levels, loosest to tightest.
_IMPLIES, _OR, _AND, _UNARY, _ATOM = 1, 2, 3, 4, 5

_PAL_TOP = Pal(top())


def _wrap(text: str, level: int, minimum: int) -> str:
    return f"({text})" if level < minimum else text


def _unwrap_not(f: TemporalFormula):
    """Invert the canonical temporal negation, or return None."""
    if isinstance(f, TNot):
        return f.operand
    if isinstance(f, Pal) and isinstance(f.formula, PNot):
        return Pal(f.formula.operand)
    return None


def _match_or_t(f: TemporalFormula):
    """Recognise a canonical temporal disjunction, collapsed or not."""
    if isinstance(f, Pal):
        inner = _match_or_p(f.formula)
        if inner is not None:
            return Pal(inner[0]), Pal(inner[1])
        return None
    if isinstance(f, TNot) and isinstance(f.operand, TAnd):
        a = _unwrap_not(f.operand.left)
        b = _unwrap_not(f.operand.right)
        if a is not None and b is not None:
            return a, b
    return None


def _match_or_p(f: PalFormula):
    if (
        isinstance(f, PNot)
        and isinstance(f.operand, PAnd)
        and isinstance(f.operand.left, PNot)
        and isinstance(f.operand.right, PNot)
    ):
        return f.operand.left.operand, f.operand.right.operand
    return None


def pretty(formula: Formula) -> str:
    """Canonical text for a formula; see the module docstring for caveats."""
    if isinstance(formula, PalFormula):
        return _pp_pal(formula, _IMPLIES)
    if isinstance(formula, TemporalFormula):
        return _pp_temporal(formula, _IMPLIES)
    raise TypeError(f"not a formula: {formula!r}")


def _pp_pal(f: PalFormula, minimum: int) -> str:
    if is_top(f):
        return "true"
    if is_bottom(f):
        return "false"
    if isinstance(f, Prop):
        atom = f.atom
        text = atom.data_id if atom.data_id == atom.class_id else f"{atom.data_id}:{atom.class_id}"
        return text
    if isinstance(f, Placeholder):
        return f"?{f.index}"
    if isinstance(f, PNot):
        disjuncts = _match_or_p(f)
        if disjuncts is not None:
            text = f"{_pp_pal(disjuncts[0], _OR)} | {_pp_pal(disjuncts[1], _AND)}"
            return _wrap(text, _OR, minimum)
        if isinstance(f.operand, PAnd) and isinstance(f.operand.right, PNot):
            text = (
                f"{_pp_pal(f.operand.left, _OR)} -> "
                f"{_pp_pal(f.operand.right.operand, _IMPLIES)}"
            )
            return _wrap(text, _IMPLIES, minimum)
        return _wrap(f"!{_pp_pal(f.operand, _UNARY)}", _UNARY, minimum)
    if isinstance(f, PAnd):
        text = f"{_pp_pal(f.left, _AND)} & {_pp_pal(f.right, _UNARY)}"
        return _wrap(text, _AND, minimum)
    if isinstance(f, Knows):
        text = f"K{{{f.agent}}} {_pp_pal(f.operand, _UNARY)}"
        return _wrap(text, _UNARY, minimum)
    if isinstance(f, Dist):
        members = ",".join(sorted(f.agents))
        text = f"D{{{members}}} {_pp_pal(f.operand, _UNARY)}"
        return _wrap(text, _UNARY, minimum)
    if isinstance(f, Announce):
        text = f"[{_pp_pal(f.announced, _IMPLIES)}] {_pp_pal(f.operand, _UNARY)}"
        return _wrap(text, _UNARY, minimum)
    raise TypeError(f"not a PAL formula: {f!r}")


def _pp_temporal(f: TemporalFormula, minimum: int) -> str:
    if isinstance(f, Pal):
        return _pp_pal(f.formula, minimum)
    if isinstance(f, Until):
        if f.left == _PAL_TOP:
            return _wrap(f"F {_pp_temporal(f.right, _UNARY)}", _UNARY, minimum)
        return f"({_pp_temporal(f.left, _IMPLIES)} U {_pp_temporal(f.right, _IMPLIES)})"
    if isinstance(f, Next):
        return _wrap(f"X {_pp_temporal(f.operand, _UNARY)}", _UNARY, minimum)
    if isinstance(f, TAnd):
        text = f"{_pp_temporal(f.left, _AND)} & {_pp_temporal(f.right, _UNARY)}"
        return _wrap(text, _AND, minimum)
    if isinstance(f, TNot):
        if isinstance(f.operand, Until):
            until = f.operand
            body = _unwrap_not(until.right)
            if until.left == _PAL_TOP and body is not None:
                return _wrap(f"G {_pp_temporal(body, _UNARY)}", _UNARY, minimum)
            held = _unwrap_not(until.left)
            if held is not None and body is not None:
                disjuncts = _match_or_t(body)
                if disjuncts is not None and disjuncts[1] == held:
                    return (
                        f"({_pp_temporal(disjuncts[0], _IMPLIES)} W "
                        f"{_pp_temporal(held, _IMPLIES)})"
                    )
                return (
                    f"({_pp_temporal(held, _IMPLIES)} R "
                    f"{_pp_temporal(body, _IMPLIES)})"
                )
        if isinstance(f.operand, TAnd):
            a = _unwrap_not(f.operand.left)
            b = _unwrap_not(f.operand.right)
            if a is not None and b is not None:
                text = f"{_pp_temporal(a, _OR)} | {_pp_temporal(b, _AND)}"
                return _wrap(text, _OR, minimum)
            if b is not None:
                text = f"{_pp_temporal(f.operand.left, _OR)} -> {_pp_temporal(b, _IMPLIES)}"
                return _wrap(text, _IMPLIES, minimum)
        return _wrap(f"!{_pp_temporal(f.operand, _UNARY)}", _UNARY, minimum)
    raise TypeError(f"not a temporal formula: {f!r}")
