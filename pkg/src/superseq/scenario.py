"""Plain-text scenario files describing a complex or a sheaf model.

A scenario is a versioned, line-oriented text file.  It starts with the
header ``superseq scenario v1``, followed by ``key: value`` lines and
named blocks::

    superseq scenario v1
    mode: raw_complex
    p_max: 2
    dims: 2 2

    [d 0]
    0 0
    1 0

    [filtration 1 0]
    0 1

Matrix rows hold rational entries like ``-3`` or ``1/2``.  Omitted
differentials are zero maps and omitted filtration blocks are zero
subspaces; the outermost and innermost filtration levels are implicit.

Sheaf scenarios carry the twist data and window instead, plus an
optional ``[cocycle exp]`` block whose lines give the images of a
level-raising derivation (the deforming cocycle is its exponential)::

    superseq scenario v1
    mode: super_sheaf
    coordinate_twists: -1 -1
    even_twists: 0
    odd_twists: 0
    window: 2

    [cocycle exp]
    e1 -> -1 x^-1 xi1 xi2 e1

A ``[symbol override]`` block (same line syntax) substitutes the
derivation used on the comparison side of the verification command; it
exists so that a deliberately wrong expectation demonstrably fails.

Unknown keys and blocks are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .deformation import QuasiDerivation, exponential
from .grassmann import AlgebraDerivation
from .linalg import RationalMatrix, Subspace
from .spectral import FilteredComplex
from .supercech import SheafModel

HEADER = "superseq scenario v1"


class ScenarioError(ValueError):
    """Malformed scenario file."""


@dataclass
class Scenario:
    mode: str
    complex: FilteredComplex | None = None
    model: SheafModel | None = None
    symbol_override: QuasiDerivation | None = None


# -- expression parser --------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<number>\d+(?:/\d+)?)
  | (?P<xpow>x\^-?\d+)
  | (?P<xi>xi\d+)
  | (?P<x>x)
  | (?P<gen>[ef]\d+)
  | (?P<plus>\+)
  | (?P<minus>-)
  | (?P<times>\*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise ScenarioError(f"cannot read expression at {text[pos:pos + 10]!r}")
        pos = match.end()
        kind = match.lastgroup
        if kind != "ws":
            out.append((kind, match.group()))
    return out


class _ExpressionParser:
    """Recursive descent over sums of products; a product with a generator
    factor is a section, one without is a coefficient."""

    def __init__(self, model: SheafModel, text: str):
        self.model = model
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self):
        value = self.expression()
        if self.peek()[0] is not None:
            raise ScenarioError(f"unexpected token {self.peek()[1]!r}")
        return value

    def expression(self):
        kind, _ = self.peek()
        sign = 1
        if kind in ("plus", "minus"):
            self.take()
            sign = -1 if kind == "minus" else 1
        value = self.term()
        if sign < 0:
            value = (value[0], value[1].scale(-1))
        while self.peek()[0] in ("plus", "minus"):
            op, _ = self.take()
            rhs = self.term()
            if op == "minus":
                rhs = (rhs[0], rhs[1].scale(-1))
            value = self._add(value, rhs)
        return value

    def term(self):
        value = self.factor()
        while self.peek()[0] in ("number", "xpow", "x", "xi", "gen", "open", "times"):
            if self.peek()[0] == "times":
                self.take()
            rhs = self.factor()
            value = self._multiply(value, rhs)
        return value

    def factor(self):
        kind, text = self.take()
        alg = self.model.algebra
        if kind == "number":
            return ("alg", alg.one().scale(Fraction(text)))
        if kind == "x":
            return ("alg", alg.x())
        if kind == "xpow":
            return ("alg", alg.x(int(text[2:])))
        if kind == "xi":
            index = int(text[2:])
            if not 1 <= index <= alg.m:
                raise ScenarioError(f"{text} is beyond the {alg.m} odd coordinates")
            return ("alg", alg.xi(index))
        if kind == "gen":
            return ("sec", self.model.generator_section(self.model.generator_index(text)))
        if kind == "open":
            value = self.expression()
            if self.take()[0] != "close":
                raise ScenarioError("missing closing parenthesis")
            return value
        raise ScenarioError(f"unexpected token {text!r}")

    @staticmethod
    def _add(a, b):
        if a[0] != b[0]:
            raise ScenarioError("cannot add a coefficient to a section")
        return (a[0], a[1] + b[1])

    @staticmethod
    def _multiply(a, b):
        if a[0] == "alg" and b[0] == "alg":
            return ("alg", a[1] * b[1])
        if a[0] == "alg" and b[0] == "sec":
            return ("sec", b[1].left_multiply(a[1]))
        raise ScenarioError("generators must stand at the end of each product")


def parse_expression(model: SheafModel, text: str):
    """Parse a polynomial expression in x, xi_i, e_j, f_j over the model."""
    return _ExpressionParser(model, text).parse()


# -- scenario files -----------------------------------------------------------

def _split_blocks(text: str):
    lines = [ln.rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if not ln.lstrip().startswith("#")]
    if not lines or lines[0].strip() != HEADER:
        raise ScenarioError(f"missing header {HEADER!r}")
    keys: dict[str, str] = {}
    blocks: list[tuple[str, list[str]]] = []
    current: list[str] | None = None
    for ln in lines[1:]:
        stripped = ln.strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = []
            blocks.append((stripped[1:-1].strip(), current))
            continue
        if current is not None:
            current.append(stripped)
            continue
        if ":" not in stripped:
            raise ScenarioError(f"expected key: value, got {stripped!r}")
        key, _, value = stripped.partition(":")
        key = key.strip()
        if key in keys:
            raise ScenarioError(f"duplicate key {key!r}")
        keys[key] = value.strip()
    return keys, blocks


def _int_list(value: str) -> list[int]:
    return [int(tok) for tok in value.split()] if value else []


def _rational_row(line: str, width: int, context: str) -> list[Fraction]:
    parts = line.split()
    if len(parts) != width:
        raise ScenarioError(f"{context}: expected {width} entries, got {len(parts)}")
    try:
        return [Fraction(p) for p in parts]
    except ValueError as exc:
        raise ScenarioError(f"{context}: {exc}") from exc


def _parse_raw_complex(keys: dict, blocks) -> Scenario:
    required = {"mode", "dims", "p_max"}
    allowed = required | {"parity"}
    unknown = set(keys) - allowed
    if unknown:
        raise ScenarioError(f"unknown keys: {sorted(unknown)}")
    missing = required - set(keys)
    if missing:
        raise ScenarioError(f"missing keys: {sorted(missing)}")

    dims = _int_list(keys["dims"])
    if not dims or any(d < 0 for d in dims):
        raise ScenarioError("dims must be a nonempty list of nonnegative integers")
    p_max = int(keys["p_max"])
    n_max = len(dims) - 1

    differentials = [RationalMatrix.zeros(dims[n + 1], dims[n]) for n in range(n_max)]
    filtration = {}
    parity = None
    if "parity" in keys:
        rows = keys["parity"].split(";")
        if len(rows) != len(dims):
            raise ScenarioError("parity needs one group per cochain degree, separated by ;")
        parity = [_int_list(row) for row in rows]

    for name, body in blocks:
        parts = name.split()
        if parts[0] == "d" and len(parts) == 2:
            n = int(parts[1])
            if not 0 <= n < n_max:
                raise ScenarioError(f"differential degree {n} out of range")
            rows = [_rational_row(ln, dims[n], f"[d {n}]") for ln in body]
            if len(rows) != dims[n + 1]:
                raise ScenarioError(f"[d {n}]: expected {dims[n + 1]} rows")
            differentials[n] = RationalMatrix(dims[n + 1], dims[n], rows)
        elif parts[0] == "filtration" and len(parts) == 3:
            p, n = int(parts[1]), int(parts[2])
            if not 0 <= n <= n_max:
                raise ScenarioError(f"filtration degree {n} out of range")
            if not 1 <= p <= p_max - 1:
                raise ScenarioError(f"filtration level {p} must be strictly inside 0..{p_max}")
            rows = [_rational_row(ln, dims[n], f"[filtration {p} {n}]") for ln in body]
            filtration[(p, n)] = Subspace.from_vectors(dims[n], rows)
        else:
            raise ScenarioError(f"unknown block [{name}]")

    try:
        complex_ = FilteredComplex(dims, differentials, filtration, p_max, parity)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    return Scenario(mode="raw_complex", complex=complex_)


def _parse_derivation_block(model: SheafModel, body: list[str],
                            context: str) -> QuasiDerivation:
    alg = model.algebra
    gen_images = [model.zero_section() for _ in range(model.generator_count)]
    image_x = alg.zero()
    image_xi = [alg.zero() for _ in range(alg.m)]
    for line in body:
        lhs, arrow, rhs = line.partition("->")
        if not arrow:
            raise ScenarioError(f"{context}: expected 'target -> expression'")
        lhs = lhs.strip()
        kind, value = parse_expression(model, rhs.strip())
        if lhs == "x":
            if kind != "alg":
                raise ScenarioError(f"{context}: the x image must be a coefficient")
            image_x = image_x + value
        elif lhs.startswith("xi"):
            index = int(lhs[2:])
            if not 1 <= index <= alg.m:
                raise ScenarioError(f"{context}: {lhs} out of range")
            if kind != "alg":
                raise ScenarioError(f"{context}: the {lhs} image must be a coefficient")
            image_xi[index - 1] = image_xi[index - 1] + value
        else:
            g = model.generator_index(lhs)
            if kind != "sec":
                raise ScenarioError(f"{context}: the {lhs} image must involve a generator")
            gen_images[g] = gen_images[g] + value
    try:
        field = AlgebraDerivation(alg, image_x, image_xi)
        return QuasiDerivation(model, gen_images, field)
    except ValueError as exc:
        raise ScenarioError(f"{context}: {exc}") from exc


def _parse_super_sheaf(keys: dict, blocks) -> Scenario:
    required = {"mode", "coordinate_twists", "even_twists", "odd_twists", "window"}
    unknown = set(keys) - required
    if unknown:
        raise ScenarioError(f"unknown keys: {sorted(unknown)}")
    missing = required - set(keys)
    if missing:
        raise ScenarioError(f"missing keys: {sorted(missing)}")

    model = SheafModel(
        coordinate_twists=tuple(_int_list(keys["coordinate_twists"])),
        even_twists=tuple(_int_list(keys["even_twists"])),
        odd_twists=tuple(_int_list(keys["odd_twists"])),
        window=int(keys["window"]),
    )

    symbol_override = None
    for name, body in blocks:
        if name == "cocycle exp":
            derivation = _parse_derivation_block(model, body, "[cocycle exp]")
            try:
                model = model.with_cocycle(exponential(derivation))
            except ValueError as exc:
                raise ScenarioError(f"[cocycle exp]: {exc}") from exc
        elif name == "symbol override":
            symbol_override = _parse_derivation_block(model, body, "[symbol override]")
        else:
            raise ScenarioError(f"unknown block [{name}]")
    return Scenario(mode="super_sheaf", model=model, symbol_override=symbol_override)


def parse_scenario(text: str) -> Scenario:
    keys, blocks = _split_blocks(text)
    mode = keys.get("mode")
    if mode == "raw_complex":
        return _parse_raw_complex(keys, blocks)
    if mode == "super_sheaf":
        return _parse_super_sheaf(keys, blocks)
    raise ScenarioError(f"mode must be raw_complex or super_sheaf, got {mode!r}")


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text)


def dump_raw_complex(complex_: FilteredComplex) -> str:
    """Serialize a filtered complex; parsing the output reproduces it."""
    lines = [HEADER, "mode: raw_complex",
             f"p_max: {complex_.p_max}",
             "dims: " + " ".join(str(d) for d in complex_.dims)]
    if complex_.parity is not None:
        lines.append("parity: " + "; ".join(
            " ".join(str(v) for v in row) for row in complex_.parity))
    for n in range(complex_.n_max):
        d = complex_.differential(n)
        if d.is_zero():
            continue
        lines.append("")
        lines.append(f"[d {n}]")
        for row in d.entries:
            lines.append(" ".join(str(v) for v in row))
    for p in range(1, complex_.p_max):
        for n in range(complex_.n_max + 1):
            space = complex_.filtration_space(p, n)
            if space.is_zero():
                continue
            lines.append("")
            lines.append(f"[filtration {p} {n}]")
            for row in space.basis.entries:
                lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"
