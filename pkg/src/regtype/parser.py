"""Reader for the pure Prolog subset: facts, rules, lists and a few infix
operators."""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .program import Clause, Program
from .terms import Number, Struct, Term, Var, mklist


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, path: str | None = None):
        self.message, self.line, self.col, self.path = message, line, col, path
        where = f"{path}:" if path else ""
        if line:
            where += f"{line}:{col}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: warning: {self.message}"


@dataclass
class SourceText:
    path: str | None
    contents: str
    program: Program
    diagnostics: list[Diagnostic] = field(default_factory=list)


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*|/\*.*?\*/)
  | (?P<number>\d+\.\d+(?:[eE][+-]?\d+)?|\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<quoted>'(?:[^'\\]|\\.|'')*')
  | (?P<end>\.(?=\s|%|$))
  | (?P<punct>[()\[\],|])
  | (?P<symbol>[+\-*/\\^<>=~:.?@#&$]+)
  | (?P<cut>!)
    """,
    re.VERBOSE | re.DOTALL,
)

# name -> (priority, type)
_INFIX_OPS = {
    ":-": (1200, "xfx"),
    ",": (1000, "xfy"),
    "=": (700, "xfx"),
    "\\=": (700, "xfx"),
    "==": (700, "xfx"),
    "\\==": (700, "xfx"),
    "=<": (700, "xfx"),
    "<": (700, "xfx"),
    ">": (700, "xfx"),
    ">=": (700, "xfx"),
    "=:=": (700, "xfx"),
    "=\\=": (700, "xfx"),
    "is": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "/": (400, "yfx"),
    "//": (400, "yfx"),
    "mod": (400, "yfx"),
}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    # whether the token is immediately followed by "(" (functional notation)
    call: bool = False


def _tokenize(text: str, path: str | None) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col, path)
        kind, value = m.lastgroup, m.group()
        if kind == "quoted":
            body = value[1:-1].replace("''", "'")
            toks.append(_Tok("name", re.sub(r"\\(.)", r"\1", body), line, col))
        elif kind == "symbol" or kind == "cut":
            toks.append(_Tok("name", value, line, col))
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, value, line, col))  # type: ignore[arg-type]
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
        if toks and kind in ("name", "quoted", "symbol", "var") and text[pos : pos + 1] == "(":
            toks[-1].call = True
    col = pos - line_start + 1
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Reader:
    def __init__(self, text: str, path: str | None):
        self.path = path
        self.toks = _tokenize(text, path)
        self.i = 0
        self.anon = itertools.count(1)
        self.var_positions: list[tuple[str, int, int]] = []

    def error(self, message: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.toks[self.i]
        return ParseError(message, tok.line, tok.col, self.path)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            found = tok.text or tok.kind
            raise self.error(f"expected {want!r}, found {found!r}")
        return self.advance()

    def at_infix(self) -> tuple[str, int, str] | None:
        tok = self.tok
        if tok.kind == "punct" and tok.text == ",":
            return ",", *_INFIX_OPS[","]
        if tok.kind == "name" and tok.text in _INFIX_OPS and not tok.call:
            return tok.text, *_INFIX_OPS[tok.text]
        return None

    def term(self, max_prec: int) -> Term:
        left, left_prec = self.primary(max_prec)
        while True:
            op = self.at_infix()
            if op is None:
                break
            name, prec, kind = op
            if prec > max_prec:
                break
            left_max = prec - 1 if kind[0] == "x" else prec
            if left_prec > left_max:
                break
            self.advance()
            right_max = prec - 1 if kind[2] == "x" else prec
            right = self.term(right_max)
            left, left_prec = Struct(name, (left, right)), prec
        return left

    def primary(self, max_prec: int) -> tuple[Term, int]:
        tok = self.advance()
        if tok.kind == "number":
            value = float(tok.text) if "." in tok.text else int(tok.text)
            return Number(value), 0
        if tok.kind == "var":
            if tok.text == "_":
                return Var(f"_G{next(self.anon)}"), 0
            self.var_positions.append((tok.text, tok.line, tok.col))
            return Var(tok.text), 0
        if tok.kind == "punct" and tok.text == "(":
            inner = self.term(1200)
            self.expect("punct", ")")
            return inner, 0
        if tok.kind == "punct" and tok.text == "[":
            if self.tok.kind == "punct" and self.tok.text == "]":
                self.advance()
                return self.compound_or_atom("[]", tok)
            items = [self.term(999)]
            while self.tok.kind == "punct" and self.tok.text == ",":
                self.advance()
                items.append(self.term(999))
            tail: Term | None = None
            if self.tok.kind == "punct" and self.tok.text == "|":
                self.advance()
                tail = self.term(999)
            self.expect("punct", "]")
            return mklist(items, tail), 0
        if tok.kind == "name":
            if tok.text == "-" and not tok.call and self.tok.kind == "number":
                num = self.advance()
                value = float(num.text) if "." in num.text else int(num.text)
                return Number(-value), 0
            return self.compound_or_atom(tok.text, tok)
        found = tok.text or "end of file"
        raise self.error(f"unexpected {found!r}", tok)

    def compound_or_atom(self, name: str, tok: _Tok) -> tuple[Term, int]:
        if tok.call:
            self.expect("punct", "(")
            args = [self.term(999)]
            while self.tok.kind == "punct" and self.tok.text == ",":
                self.advance()
                args.append(self.term(999))
            self.expect("punct", ")")
            return Struct(name, tuple(args)), 0
        prec = _INFIX_OPS[name][0] if name in _INFIX_OPS else 0
        return Struct(name), prec

    def clause(self) -> tuple[Term, int, int]:
        first = self.tok
        self.var_positions = []
        t = self.term(1200)
        if self.tok.kind != "end":
            raise self.error(f"expected end of clause '.', found {self.tok.text or 'end of file'!r}")
        self.advance()
        return t, first.line, first.col


def _body_literals(t: Term, reader: _Reader, line: int, col: int) -> list[Struct]:
    out: list[Struct] = []
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Struct) and u.name == "," and len(u.args) == 2:
            stack.extend(reversed(u.args))
        elif isinstance(u, Struct):
            out.append(u)
        else:
            raise ParseError(f"body goal {u} is not callable", line, col, reader.path)
    return out


def parse_source(text: str, path: str | None = None) -> SourceText:
    """Parse program text, collecting singleton-variable warnings."""
    reader = _Reader(text, path)
    program = Program()
    diagnostics: list[Diagnostic] = []
    while reader.tok.kind != "eof":
        if reader.tok.kind == "name" and reader.tok.text == ":-" and not reader.tok.call:
            # directives may use operators this reader does not know
            first = reader.tok
            while reader.tok.kind not in ("end", "eof"):
                reader.advance()
            if reader.tok.kind == "eof":
                raise reader.error("unterminated directive")
            reader.advance()
            diagnostics.append(Diagnostic(first.line, first.col, "directive ignored"))
            continue
        t, line, col = reader.clause()
        if isinstance(t, Struct) and t.name == ":-" and len(t.args) == 2:
            head, body = t.args
            literals = _body_literals(body, reader, line, col)
        else:
            head, literals = t, []
        if not isinstance(head, Struct):
            raise ParseError(f"clause head {head} is not callable", line, col, path)
        program.add(Clause(head, tuple(literals)))
        counts = Counter(name for name, _, _ in reader.var_positions)
        for name, vline, vcol in reader.var_positions:
            if counts[name] == 1 and not name.startswith("_"):
                diagnostics.append(Diagnostic(vline, vcol, f"singleton variable {name}"))
    return SourceText(path, text, program, diagnostics)


def parse_program(text: str) -> Program:
    return parse_source(text).program


def read_program(path: str | Path) -> SourceText:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror or exc}", 0, 0, str(p)) from None
    return parse_source(text, str(p))
