"""Reaction-network DSL: parsing, diagnostics and serialization.

A document is a list of statements, one per line or separated by ``;``::

    # Example: a three-species cycle fed from the zero complex
    0 -> S1 [2]
    S1 <-> 2 S2 [1, 1/2]
    S2 + S3 -> S3 [1.5e-1]

``#`` starts a comment. A leading ``#@species A B C`` pragma fixes the
species order (the serializer writes it so that round trips are exact);
otherwise species are numbered by first appearance.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from . import jsonio
from .network import Reaction, ReactionNetwork, format_number

log = logging.getLogger(__name__)

PRAGMA = "#@species"


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {"line": self.line, "column": self.column, "severity": self.severity, "message": self.message}


class NetworkParseError(ValueError):
    """Raised when a document contains at least one error diagnostic."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == "error"]
        super().__init__("; ".join(str(d) for d in errors) or "parse error")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


_COMPLEX_RE = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)"
    r"|(?P<comment>\#.*)"
    r"|(?P<semi>;)"
    r"|(?P<biarrow><->)"
    r"|(?P<arrow>->)"
    r"|(?P<plus>\+)"
    r"|(?P<lbrack>\[)"
    r"|(?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:/\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
)
_RATE_RE = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)"
    r"|(?P<comma>,)"
    r"|(?P<rbrack>\])"
    r"|(?P<rate>[^\s,\]\[#;]+)"
)


class _Syntax(Exception):
    def __init__(self, tok_or_pos, message: str):
        if isinstance(tok_or_pos, _Tok):
            self.line, self.col = tok_or_pos.line, tok_or_pos.col
        else:
            self.line, self.col = tok_or_pos
        self.message = message


def _tokenize(text: str, diags: list[ParseDiagnostic]) -> tuple[list[list[_Tok]], Optional[list[str]]]:
    """Split the document into statements (lists of tokens)."""
    statements: list[list[_Tok]] = []
    declared: Optional[list[str]] = None
    current: list[_Tok] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith(PRAGMA) and declared is None and not statements and not current:
            declared = stripped[len(PRAGMA):].split()
            continue
        pos = 0
        in_rate = False
        bad_line = False
        while pos < len(line):
            m = (_RATE_RE if in_rate else _COMPLEX_RE).match(line, pos)
            if m is None:
                diags.append(ParseDiagnostic(lineno, pos + 1, f"unexpected character {line[pos]!r}"))
                bad_line = True
                break
            kind = m.lastgroup
            if kind == "comment":
                break
            if kind == "semi":
                if current:
                    statements.append(current)
                current = []
            elif kind != "ws":
                current.append(_Tok(kind, m.group(), lineno, pos + 1))
                if kind == "lbrack":
                    in_rate = True
                elif kind == "rbrack":
                    in_rate = False
            pos = m.end()
        if bad_line:
            # drop the broken statement, keep going with the next line
            current = []
            continue
        if current:
            statements.append(current)
        current = []
    return statements, declared


class _StatementParser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def end_pos(self) -> tuple[int, int]:
        last = self.toks[-1]
        return (last.line, last.col + len(last.text))

    def expect(self, kind: str, what: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise _Syntax(self.end_pos(), f"expected {what}, found end of statement")
        if tok.kind != kind:
            raise _Syntax(tok, f"expected {what}, found {tok.text!r}")
        return self.take()

    def complex(self) -> list[tuple[Fraction, _Tok]]:
        """Return (coefficient, species token) terms; [] is the zero complex."""
        tok = self.peek()
        if tok is None:
            raise _Syntax(self.end_pos(), "expected a complex, found end of statement")
        if tok.kind == "number":
            nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
            if (nxt is None or nxt.kind != "ident") and tok.text == "0":
                self.take()
                return []
        terms = [self.term()]
        while self.peek() is not None and self.peek().kind == "plus":
            self.take()
            terms.append(self.term())
        return terms

    def term(self) -> tuple[Fraction, _Tok]:
        tok = self.peek()
        coeff = Fraction(1)
        if tok is not None and tok.kind == "number":
            self.take()
            try:
                coeff = Fraction(tok.text)
            except ZeroDivisionError:
                raise _Syntax(tok, "zero denominator in coefficient") from None
        name = self.expect("ident", "a species name")
        return coeff, name

    def rates(self) -> Optional[list[tuple[Fraction, _Tok]]]:
        tok = self.peek()
        if tok is None:
            return None
        if tok.kind != "lbrack":
            raise _Syntax(tok, f"unexpected {tok.text!r} after reaction")
        self.take()
        values = [self.rate()]
        if self.peek() is not None and self.peek().kind == "comma":
            self.take()
            values.append(self.rate())
        self.expect("rbrack", "']'")
        if self.peek() is not None:
            raise _Syntax(self.peek(), f"unexpected {self.peek().text!r} after rate")
        return values

    def rate(self) -> tuple[Fraction, _Tok]:
        tok = self.expect("rate", "a rate constant")
        try:
            return Fraction(tok.text), tok
        except (ValueError, ZeroDivisionError):
            raise _Syntax(tok, f"malformed rate constant {tok.text!r}") from None


def parse_with_diagnostics(text: str) -> tuple[Optional[ReactionNetwork], list[ParseDiagnostic]]:
    """Parse a DSL document, returning the network (None on error) and all diagnostics."""
    diags: list[ParseDiagnostic] = []
    statements, declared = _tokenize(text, diags)

    species: list[str] = list(declared) if declared else []
    index = {s: i for i, s in enumerate(species)}
    first_seen: dict[str, _Tok] = {}
    # (source terms, target terms, rate, anchor token)
    edges: list[tuple[dict, dict, Fraction, _Tok]] = []

    def collect(terms) -> dict:
        out: dict[int, Fraction] = {}
        for coeff, tok in terms:
            if tok.text not in index:
                if declared:
                    raise _Syntax(tok, f"species {tok.text!r} is not declared in the {PRAGMA} pragma")
                index[tok.text] = len(species)
                species.append(tok.text)
            first_seen.setdefault(tok.text, tok)
            j = index[tok.text]
            out[j] = out.get(j, Fraction(0)) + coeff
        return {j: c for j, c in out.items() if c != 0}

    for toks in statements:
        p = _StatementParser(toks)
        try:
            lhs_terms = p.complex()
            arrow = p.peek()
            if arrow is None or arrow.kind not in ("arrow", "biarrow"):
                raise _Syntax(arrow if arrow is not None else p.end_pos(),
                              "expected '->' or '<->'" + (f", found {arrow.text!r}" if arrow else ""))
            p.take()
            rhs_terms = p.complex()
            rates = p.rates()
        except _Syntax as err:
            diags.append(ParseDiagnostic(err.line, err.col, err.message))
            continue
        try:
            lhs, rhs = collect(lhs_terms), collect(rhs_terms)
        except _Syntax as err:
            diags.append(ParseDiagnostic(err.line, err.col, err.message))
            continue

        if rates is None:
            diags.append(ParseDiagnostic(arrow.line, arrow.col, "no rate constant given; using 1", "warning"))
            rates = [(Fraction(1), arrow)]
        if len(rates) == 2 and arrow.kind == "arrow":
            diags.append(ParseDiagnostic(rates[1][1].line, rates[1][1].col,
                                         "two rate constants given for an irreversible reaction"))
            continue
        bad = [(q, t) for q, t in rates if q <= 0]
        if bad:
            for q, t in bad:
                diags.append(ParseDiagnostic(t.line, t.col, f"rate constant must be positive, got {t.text}"))
            continue
        if lhs == rhs:
            diags.append(ParseDiagnostic(arrow.line, arrow.col, "source and target complexes coincide (self-loop)"))
            continue
        fwd = rates[0][0]
        back = rates[1][0] if len(rates) == 2 else fwd
        edges.append((lhs, rhs, fwd, arrow))
        if arrow.kind == "biarrow":
            edges.append((rhs, lhs, back, arrow))

    d = len(species)

    def vec(terms: dict) -> tuple:
        return tuple(terms.get(j, Fraction(0)) for j in range(d))

    reactions: list[Reaction] = []
    seen: set = set()
    for lhs, rhs, k, anchor in edges:
        src, tgt = vec(lhs), vec(rhs)
        if (src, tgt) in seen:
            diags.append(ParseDiagnostic(anchor.line, anchor.col, "duplicate reaction edge"))
            continue
        seen.add((src, tgt))
        reactions.append(Reaction(src, tgt, k))

    changed = set()
    for r in reactions:
        changed |= {j for j, c in enumerate(r.vector) if c != 0}
    for j, name in enumerate(species):
        if j not in changed:
            tok = first_seen.get(name)
            line, col = (tok.line, tok.col) if tok else (1, 1)
            diags.append(ParseDiagnostic(line, col, f"species {name} is redundant (no reaction changes it)", "warning"))

    diags.sort(key=lambda g: (g.line, g.column))
    if any(g.severity == "error" for g in diags):
        return None, diags
    return ReactionNetwork(species, reactions), diags


def parse_network(text: str) -> ReactionNetwork:
    """Parse a DSL document or raise :class:`NetworkParseError`. Warnings are logged."""
    net, diags = parse_with_diagnostics(text)
    if net is None:
        raise NetworkParseError(diags)
    for g in diags:
        log.debug("%s", g)
    return net


# -- serialization ---------------------------------------------------------

def _coeff_json(c: Fraction):
    return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def complex_to_json(net: ReactionNetwork, y) -> dict:
    return {name: _coeff_json(c) for name, c in zip(net.species, y) if c != 0}


def reaction_to_json(net: ReactionNetwork, r: Reaction) -> dict:
    return {"source": complex_to_json(net, r.source), "target": complex_to_json(net, r.target), "rate": r.rate}


def network_to_json(net: ReactionNetwork) -> dict:
    return {"species": list(net.species), "reactions": [reaction_to_json(net, r) for r in net.reactions]}


def serialize_network(net: ReactionNetwork, format: str = "dsl") -> str:
    if format == "json":
        return jsonio.dumps(network_to_json(net)) + "\n"
    if format != "dsl":
        raise ValueError(f"unknown format {format!r}")
    if net.is_empty():
        raise ValueError("the empty network has no DSL form (the grammar needs at least one edge)")
    lines = [PRAGMA + " " + " ".join(net.species)]
    for r in net.reactions:
        lines.append(f"{net.format_reaction(r)} [{format_number(r.rate)}]")
    return "\n".join(lines) + "\n"


def _json_fraction(value, what: str) -> Fraction:
    if isinstance(value, bool):
        raise ValueError(f"{what}: expected a number")
    if isinstance(value, (int, Fraction, str)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    raise ValueError(f"{what}: expected a number, got {value!r}")


def network_from_json(doc: Union[str, dict]) -> ReactionNetwork:
    """Build a network from the JSON schema written by :func:`serialize_network`."""
    try:
        if isinstance(doc, str):
            doc = jsonio.loads(doc)
        species = [str(s) for s in doc["species"]]
        index = {s: i for i, s in enumerate(species)}
        reactions = []
        for n, item in enumerate(doc.get("reactions", [])):
            def vec(part):
                y = [Fraction(0)] * len(species)
                for name, c in item[part].items():
                    if name not in index:
                        raise ValueError(f"reaction {n}: unknown species {name!r}")
                    y[index[name]] = _json_fraction(c, f"reaction {n} coefficient")
                return tuple(y)
            rate = _json_fraction(item.get("rate", 1), f"reaction {n} rate")
            reactions.append(Reaction(vec("source"), vec("target"), rate))
        return ReactionNetwork(species, reactions)
    except (KeyError, TypeError, ValueError, ZeroDivisionError, json.JSONDecodeError) as exc:
        raise NetworkParseError([ParseDiagnostic(1, 1, f"invalid network JSON: {exc}")]) from exc


def load_network(path: Union[str, Path]) -> ReactionNetwork:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return network_from_json(text)
    return parse_network(text)
