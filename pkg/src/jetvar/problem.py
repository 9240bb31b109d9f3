"""Problem files: a small line-based format plus an expression parser.

Example::

    problem free_particle
    base t
    fields u
    cover R-x-Rm
    lagrangian U = 1/2*u_t^2
    vector shift: u = 1

Keywords (one statement per line, ``#`` starts a comment):

``problem NAME``
    identifier of the problem.
``base NAMES`` / ``fields NAMES``
    base and fiber coordinate names; n and m are their counts.
``angles NAMES``
    fields that are angle coordinates of the cover.
``order N``
    jet-order cap (default 6).
``param NAME [= VALUE]``
    named constant, optionally with a rational value used for periods.
``cover NAME``
    built-in cover (``R-x-Rm``, ``R-x-S1``, ``R-x-S2-monopole``, ``R2-x-T2``).
``lagrangian CHARTS = EXPR``
    chart Lagrangian; ``CHARTS`` is a comma list of chart names or ``*``.
``source CHARTS = [EXPR, ...]``
    chart source form, one component per field.
``vector NAME: COORD = EXPR, ...``
    vector field by its nonzero components (base names and field names).
``option KEY = VALUE``
    ``ansatz-degree``, ``ansatz-order``, ``quad-nodes``, ``tolerance``, ``fallback``.

Expressions use ``+ - * / ^``, parentheses, rational or decimal numbers,
``sin``, ``cos``, ``exp``, ``pi``, declared parameters and jet coordinates
written ``u``, ``u_t``, ``u_tx`` (field name, underscore, base names).
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .cech import BUILTIN_COVERS, Chart, Cochain, Cover, builtin_cover
from .errors import JetVarError, ProblemSyntaxError
from .jetforms import VectorField
from .symexpr import Expr, JetSpace, cos, exp, param, sin
from .varseq import AnsatzSpec, Lagrangian, SourceForm

DEFAULT_ORDER = 6
_FUNCS = {"sin": sin, "cos": cos, "exp": exp}
_OPTION_TYPES = {
    "ansatz-degree": int,
    "ansatz-order": int,
    "quad-nodes": int,
    "tolerance": float,
    "fallback": lambda s: {"true": True, "false": False}[s.lower()],
}


# ------------------------------------------------------------ tokenizer
_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass
class Token:
    kind: str  # num, name, op, end
    text: str
    col: int


def tokenize(text: str, line: int, col0: int = 1) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        num, name, op = m.groups()
        start = m.start(m.lastindex) + col0
        if num:
            out.append(Token("num", num, start))
        elif name:
            out.append(Token("name", name, start))
        elif op is not None:
            if op not in "+-*/^(),[]":
                raise ProblemSyntaxError(f"unexpected character {op!r}", line, start)
            out.append(Token("op", op, start))
        pos = m.end()
    out.append(Token("end", "", col0 + len(text)))
    return out


class ExprParser:
    """Precedence-climbing parser producing :class:`Expr`."""

    _BINARY = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}

    def __init__(self, tokens: list, space: JetSpace, params: dict, line: int):
        self.tokens = tokens
        self.i = 0
        self.space = space
        self.params = params
        self.line = line

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        return ProblemSyntaxError(msg, self.line, tok.col)

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind != "op":
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of line'!r}")
        tok = self.tok
        self.i += 1
        return tok

    def parse(self, min_prec: int = 0) -> Expr:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in self._BINARY:
            op = self.tok
            prec = self._BINARY[op.text]
            if prec < min_prec:
                break
            self.i += 1
            right = self.parse(prec if op.text == "^" else prec + 1)
            left = self.apply(op, left, right)
        return left

    def apply(self, op: Token, left: Expr, right: Expr) -> Expr:
        if op.text == "+":
            return left + right
        if op.text == "-":
            return left - right
        if op.text == "*":
            return left * right
        if op.text == "/":
            if not right.is_constant or right.is_zero:
                raise self.error("division only by a nonzero rational constant", op)
            return left / right.constant_value()
        if not right.is_constant or right.constant_value().denominator != 1 or right.constant_value() < 0:
            raise self.error("exponent must be a nonnegative integer", op)
        return left ** int(right.constant_value())

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = self.tok.text
            self.i += 1
            inner = self.parse(self._BINARY["*"])
            return -inner if sign == "-" else inner
        return self.atom()

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Expr.const(Fraction(tok.text))
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            inner = self.parse()
            self.expect(")")
            return inner
        if tok.kind == "name":
            self.i += 1
            if tok.text in _FUNCS:
                self.expect("(")
                arg = self.parse()
                self.expect(")")
                try:
                    return _FUNCS[tok.text](arg)
                except JetVarError as exc:
                    raise self.error(str(exc), tok) from None
            if tok.text == "pi":
                return Expr.coord(param("pi"))
            if tok.text in self.params:
                return Expr.coord(param(tok.text))
            c = self.space.parse_coordinate(tok.text)
            if c is None:
                raise self.error(f"undeclared symbol {tok.text!r}", tok)
            if c.order > self.space.max_order:
                raise self.error(f"{tok.text} exceeds the jet-order cap {self.space.max_order}", tok)
            return Expr.coord(c)
        raise self.error(f"unexpected {tok.text or 'end of line'!r}")


def parse_expr(text: str, space: JetSpace, params=(), line: int = 1, col0: int = 1) -> Expr:
    parser = ExprParser(tokenize(text, line, col0), space, {p: None for p in params}, line)
    out = parser.parse()
    if parser.tok.kind != "end":
        raise parser.error(f"unexpected {parser.tok.text!r}")
    return out


# ------------------------------------------------------------ problem files
@dataclass
class ProblemFile:
    name: str
    base: tuple
    fields: tuple
    angles: tuple = ()
    order: int = DEFAULT_ORDER
    params: dict = field(default_factory=dict)  # name -> Fraction | None
    cover_name: str = "R-x-Rm"
    lagrangians: dict = field(default_factory=dict)  # chart -> Expr
    sources: dict = field(default_factory=dict)  # chart -> tuple of Expr
    vectors: dict = field(default_factory=dict)  # name -> (xi tuple, components tuple)
    options: dict = field(default_factory=dict)

    @property
    def space(self) -> JetSpace:
        return JetSpace(len(self.base), len(self.fields), self.order, self.base, self.fields, tuple(self.params))

    def cover(self) -> Cover:
        cover = builtin_cover(self.cover_name, self.space)
        extra = self.angle_indices()
        cover.charts = [Chart(c.name, c.angle_fields | extra) for c in cover.charts]
        return cover

    def angle_indices(self) -> frozenset:
        return frozenset(self.fields.index(a) for a in self.angles)

    def vector(self, name: str | None = None) -> VectorField:
        if not self.vectors:
            raise JetVarError("the problem declares no vector field")
        name = name or next(iter(self.vectors))
        if name not in self.vectors:
            raise JetVarError(f"unknown vector field {name!r}; declared: {', '.join(self.vectors)}")
        xi, comps = self.vectors[name]
        return VectorField(self.space, xi, comps, name)

    def param_values(self) -> dict:
        return {k: v for k, v in self.params.items() if v is not None}

    def ansatz(self) -> AnsatzSpec:
        return AnsatzSpec(
            max_poly_degree=self.options.get("ansatz-degree", 4),
            max_jet_order=self.options.get("ansatz-order", 2),
            angle_fields=self.angle_indices(),
        )

    def lagrangian_cochain(self, cover: Cover | None = None) -> Cochain:
        cover = cover or self.cover()
        sp = self.space
        return Cochain.on_charts(
            {cover.chart_index(ch): Lagrangian(e, sp) for ch, e in self.lagrangians.items()}, "lagrangian"
        )

    def source_cochain(self, cover: Cover | None = None) -> Cochain:
        cover = cover or self.cover()
        sp = self.space
        return Cochain.on_charts(
            {cover.chart_index(ch): SourceForm(c, sp) for ch, c in self.sources.items()}, "source"
        )


def _names(rest: str, line: int, col: int) -> tuple:
    names = tuple(rest.replace(",", " ").split())
    for nm in names:
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", nm):
            raise ProblemSyntaxError(f"bad name {nm!r}", line, col)
    if len(set(names)) != len(names):
        raise ProblemSyntaxError("duplicate names", line, col)
    return names


def _split_top(text: str, sep: str = ",") -> list:
    """Split on ``sep`` outside brackets; returns (offset, piece) pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((start, text[start:i]))
            start = i + 1
    out.append((start, text[start:]))
    return out


def parse_problem(text: str) -> ProblemFile:
    """Parse a problem file; errors carry 1-based line and column."""
    header: dict = {}
    params: dict = {}
    options: dict = {}
    body = []  # (line number, keyword, rest, column of rest)
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        kw, _, rest = line.strip().partition(" ")
        col = indent + len(kw) + 2 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()
        if kw in ("problem", "cover"):
            if not rest or " " in rest:
                raise ProblemSyntaxError(f"{kw} takes one name", ln, col)
            header[kw] = rest
        elif kw in ("base", "fields", "angles"):
            header[kw] = (_names(rest, ln, col), ln, col)
        elif kw == "order":
            if not rest.isdigit():
                raise ProblemSyntaxError("order must be an integer", ln, col)
            header["order"] = int(rest)
        elif kw == "param":
            name, eq, value = (p.strip() for p in rest.partition("="))
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", name) or name == "pi":
                raise ProblemSyntaxError(f"bad parameter name {name!r}", ln, col)
            try:
                params[name] = Fraction(value) if eq else None
            except ValueError:
                raise ProblemSyntaxError(f"bad parameter value {value!r}", ln, col) from None
        elif kw == "option":
            key, eq, value = (p.strip() for p in rest.partition("="))
            if key not in _OPTION_TYPES or not eq:
                raise ProblemSyntaxError(f"unknown option {key!r}", ln, col)
            try:
                options[key] = _OPTION_TYPES[key](value)
            except (ValueError, KeyError):
                raise ProblemSyntaxError(f"bad value for option {key}", ln, col) from None
        elif kw in ("lagrangian", "source", "vector"):
            body.append((ln, kw, rest, col))
        else:
            raise ProblemSyntaxError(f"unknown keyword {kw!r}", ln, indent + 1)
    for req in ("problem", "base", "fields"):
        if req not in header:
            raise ProblemSyntaxError(f"missing '{req}' line", 1, 1)
    base = header["base"][0]
    fields = header["fields"][0]
    if set(base) & set(fields) or set(params) & (set(base) | set(fields)):
        raise ProblemSyntaxError("base, field and parameter names must be distinct", header["fields"][1], 1)
    angles = ()
    if "angles" in header:
        angles, ln, col = header["angles"]
        for a in angles:
            if a not in fields:
                raise ProblemSyntaxError(f"angle {a!r} is not a declared field", ln, col)
    prob = ProblemFile(
        name=header["problem"],
        base=base,
        fields=fields,
        angles=angles,
        order=header.get("order", DEFAULT_ORDER),
        params=params,
        cover_name=header.get("cover", "R-x-Rm"),
        options=options,
    )
    if prob.cover_name not in BUILTIN_COVERS:
        raise ProblemSyntaxError(f"unknown cover {prob.cover_name!r}", 1, 1)
    sp = prob.space
    try:
        chart_names = [c.name for c in prob.cover().charts]
    except JetVarError as exc:
        raise ProblemSyntaxError(str(exc), 1, 1) from None
    for ln, kw, rest, col in body:
        if kw == "vector":
            name, colon, comps = rest.partition(":")
            name = name.strip()
            if not colon or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name):
                raise ProblemSyntaxError("expected 'vector NAME: coord = expr, ...'", ln, col)
            if name in prob.vectors:
                raise ProblemSyntaxError(f"vector {name!r} declared twice", ln, col)
            xi = [Expr()] * sp.n
            cs = [Expr()] * sp.m
            offset = col + len(rest) - len(comps)
            if comps.strip():
                for off, piece in _split_top(comps):
                    target, eq, expr = piece.partition("=")
                    tcol = offset + off + len(target) - len(target.lstrip())
                    target = target.strip()
                    if not eq:
                        raise ProblemSyntaxError("expected 'coord = expr'", ln, tcol)
                    ecol = offset + off + len(piece) - len(expr)
                    value = parse_expr(expr, sp, params, ln, ecol)
                    if target in base:
                        xi[base.index(target)] = value
                    elif target in fields:
                        cs[fields.index(target)] = value
                    else:
                        raise ProblemSyntaxError(f"undeclared coordinate {target!r}", ln, tcol)
            try:
                VectorField(sp, xi, cs, name)
            except (ValueError, JetVarError) as exc:
                raise ProblemSyntaxError(str(exc), ln, col) from None
            prob.vectors[name] = (tuple(xi), tuple(cs))
            continue
        charts, eq, expr = rest.partition("=")
        if not eq:
            raise ProblemSyntaxError(f"expected '{kw} CHARTS = ...'", ln, col)
        targets = [c.strip() for c in charts.split(",")]
        if targets == ["*"]:
            targets = chart_names
        for t in targets:
            if t not in chart_names:
                raise ProblemSyntaxError(
                    f"cover {prob.cover_name} has no chart {t!r} (charts: {', '.join(chart_names)})", ln, col
                )
        ecol = col + len(rest) - len(expr)
        if kw == "lagrangian":
            value = parse_expr(expr, sp, params, ln, ecol)
            store = prob.lagrangians
        else:
            inner = expr.strip()
            lead = ecol + len(expr) - len(expr.lstrip())
            if not (inner.startswith("[") and inner.endswith("]")):
                raise ProblemSyntaxError("a source form is written [e1, e2, ...]", ln, lead)
            pieces = _split_top(inner[1:-1])
            if len(pieces) != sp.m:
                raise ProblemSyntaxError(f"source form needs {sp.m} components, got {len(pieces)}", ln, lead)
            value = tuple(parse_expr(p, sp, params, ln, lead + 1 + off) for off, p in pieces)
            store = prob.sources
        for t in targets:
            if t in store:
                raise ProblemSyntaxError(f"{kw} for chart {t} given twice", ln, col)
            store[t] = value
    order_of = {c: i for i, c in enumerate(chart_names)}
    prob.lagrangians = dict(sorted(prob.lagrangians.items(), key=lambda kv: order_of[kv[0]]))
    prob.sources = dict(sorted(prob.sources.items(), key=lambda kv: order_of[kv[0]]))
    return prob


def format_problem(prob: ProblemFile) -> str:
    """Canonical text of a problem; ``parse_problem`` reads it back unchanged."""
    sp = prob.space
    lines = [f"problem {prob.name}", f"base {' '.join(prob.base)}", f"fields {' '.join(prob.fields)}"]
    if prob.angles:
        lines.append(f"angles {' '.join(prob.angles)}")
    lines.append(f"order {prob.order}")
    for k, v in prob.params.items():
        lines.append(f"param {k}" + ("" if v is None else f" = {v}"))
    lines.append(f"cover {prob.cover_name}")
    for ch, e in prob.lagrangians.items():
        lines.append(f"lagrangian {ch} = {sp.fmt(e)}")
    for ch, comps in prob.sources.items():
        lines.append(f"source {ch} = [{', '.join(sp.fmt(c) for c in comps)}]")
    for name, (xi, cs) in prob.vectors.items():
        parts = [f"{prob.base[i]} = {sp.fmt(e)}" for i, e in enumerate(xi) if not e.is_zero]
        parts += [f"{prob.fields[a]} = {sp.fmt(e)}" for a, e in enumerate(cs) if not e.is_zero]
        lines.append(f"vector {name}: {', '.join(parts)}")
    for k, v in prob.options.items():
        lines.append(f"option {k} = {str(v).lower() if isinstance(v, bool) else v}")
    return "\n".join(lines) + "\n"


SHIPPED = ("free_particle", "harmonic", "winding_s1", "monopole_s2", "wave_2d")


def shipped_text(name: str) -> str:
    return resources.files("jetvar.problems").joinpath(f"{name}.vsq").read_text(encoding="utf-8")


def load_problem(path_or_name: str) -> ProblemFile:
    """Read a problem file, or a shipped problem by name."""
    if os.path.exists(path_or_name):
        with open(path_or_name, encoding="utf-8") as fh:
            return parse_problem(fh.read())
    if path_or_name in SHIPPED:
        return parse_problem(shipped_text(path_or_name))
    raise FileNotFoundError(path_or_name)


__all__ = [
    "ProblemFile",
    "parse_expr",
    "parse_problem",
    "format_problem",
    "load_problem",
    "shipped_text",
    "SHIPPED",
]
