"""Linear stream circuits: parsing, transfer functions and logic encodings.

File format, one declaration per line (``#`` starts a comment)::

    input z
    node h1 = delay h2
    node h3 = add z h1
    node h2 = copy h3
    node h4 = scale 1/2 h3
    output y = h3
"""
from __future__ import annotations

import graphlib
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    AlgebraicLoop, ArityMismatch, CircuitError, NotCausal, StreamLogicError,
    UnboundVariable,
)
from .logic import (
    Add, Atom, Forall, Formula, Implies, Mul, RatConst, Sort, StreamConst,
    Term, Var, XConst, conj, free_vars,
)
from .streams import ONE, ZERO, LaurentRational, coeffs, valuation

KINDS = {"input": 0, "delay": 1, "copy": 1, "output": 1, "add": 2, "scale": 1}


@dataclass(frozen=True)
class Node:
    name: str
    kind: str
    srcs: tuple = ()
    factor: Fraction = Fraction(1)


@dataclass
class Circuit:
    nodes: dict
    inputs: list
    outputs: list

    def names(self) -> list:
        return list(self.nodes)


@dataclass(frozen=True)
class Equation:
    """``coeff * target = sum(c * src)``."""

    target: str
    coeff: Fraction
    rhs: tuple

    def __str__(self):
        lhs = self.target if self.coeff == 1 else f"{self.coeff}*{self.target}"
        parts = [src if c == ONE else f"{_paren(c)}*{src}" for c, src in self.rhs]
        return f"{lhs} = {' + '.join(parts)}"


def _paren(c: LaurentRational) -> str:
    s = str(c)
    return s if s.replace("-", "").isalnum() else f"({s})"


@dataclass
class TransferMatrix:
    inputs: list
    outputs: list
    entries: list  # rows = outputs, columns = inputs

    def entry(self, out: str, inp: str) -> LaurentRational:
        return self.entries[self.outputs.index(out)][self.inputs.index(inp)]

    def lines(self) -> list:
        if len(self.inputs) == 1 and len(self.outputs) == 1:
            return [str(self.entries[0][0])]
        return [f"{o} <- {i}: {self.entries[r][c]}"
                for r, o in enumerate(self.outputs) for c, i in enumerate(self.inputs)]

    def __str__(self):
        return "\n".join(self.lines())


# ---------------------------------------------------------------------------
# Parsing


def _factor(text: str, lineno: int) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CircuitError(f"line {lineno}: bad scale factor {text!r}", line=lineno) from None
    return value


def parse_circuit(text: str) -> Circuit:
    nodes: dict = {}
    inputs, outputs = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.replace("=", " = ").split()
        head = words[0]
        if head == "input" and len(words) == 2:
            name, kind, args, factor = words[1], "input", [], Fraction(1)
        elif head in ("node", "output") and len(words) >= 4 and words[2] == "=":
            name = words[1]
            if head == "output":
                kind, args = "output", words[3:]
            else:
                kind, args = words[3], words[4:]
            factor = Fraction(1)
            if kind == "scale":
                if len(args) != 2:
                    raise CircuitError(f"line {lineno}: scale takes a factor and a source",
                                       line=lineno)
                factor = _factor(args[0], lineno)
                args = args[1:]
            if kind not in KINDS or kind == "input":
                raise CircuitError(f"line {lineno}: unknown element {kind!r}", line=lineno)
            if kind == "add" and len(args) > 2:
                # wider fan-in becomes a chain of binary adders
                acc = args[0]
                for k, extra in enumerate(args[1:-1]):
                    aux = f"{name}_{k}"
                    nodes[aux] = Node(aux, "add", (acc, extra))
                    acc = aux
                args = [acc, args[-1]]
            if len(args) != KINDS[kind]:
                raise CircuitError(f"line {lineno}: {kind} takes {KINDS[kind]} source(s)",
                                   line=lineno)
        else:
            raise CircuitError(f"line {lineno}: cannot read {raw.strip()!r}", line=lineno)
        if name in nodes:
            raise CircuitError(f"line {lineno}: duplicate name {name!r}", line=lineno)
        nodes[name] = Node(name, kind, tuple(args), factor)
        if kind == "input":
            inputs.append(name)
        elif kind == "output":
            outputs.append(name)
    for n in nodes.values():
        for s in n.srcs:
            if s not in nodes:
                raise CircuitError(f"{n.name} refers to undefined node {s!r}", node=n.name)
            if nodes[s].kind == "output":
                raise CircuitError(f"{n.name} reads from output {s!r}", node=n.name)
    if not inputs or not outputs:
        raise CircuitError("a circuit needs at least one input and one output")
    return Circuit(nodes, inputs, outputs)


# ---------------------------------------------------------------------------
# Equations and transfer functions


def to_equations(c: Circuit) -> list:
    eqs = []
    for n in c.nodes.values():
        if n.kind == "input":
            continue
        if n.kind == "delay":
            rhs = ((LaurentRational.X(), n.srcs[0]),)
        elif n.kind == "add":
            a, b = n.srcs
            rhs = ((ONE + ONE, a),) if a == b else ((ONE, a), (ONE, b))
        elif n.kind == "scale":
            f = n.factor
            eqs.append(Equation(n.name, Fraction(f.denominator),
                                ((LaurentRational.const(f.numerator), n.srcs[0]),)))
            continue
        else:
            rhs = ((ONE, n.srcs[0]),)
        eqs.append(Equation(n.name, Fraction(1), rhs))
    return eqs


def delay_free_cycle(c: Circuit):
    """A loop that passes through no delay, or ``None``."""
    graph = {n.name: set() if n.kind == "delay" else set(n.srcs) for n in c.nodes.values()}
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        return list(exc.args[1])
    return None


def _solve(a: list, b: list):
    """Gauss-Jordan over rational streams; ``None`` when ``a`` is singular."""
    n = len(a)
    a = [row[:] for row in a]
    b = [row[:] for row in b]
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        inv = ONE / a[col][col]
        a[col] = [x * inv for x in a[col]]
        b[col] = [x * inv for x in b[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                b[r] = [x - f * y for x, y in zip(b[r], b[col])]
    return b


def transfer(c: Circuit) -> TransferMatrix:
    unknowns = [n for n in c.nodes if c.nodes[n].kind != "input"]
    index = {u: i for i, u in enumerate(unknowns)}
    a = [[ZERO] * len(unknowns) for _ in unknowns]
    b = [[ZERO] * len(c.inputs) for _ in unknowns]
    for eq in to_equations(c):
        i = index[eq.target]
        a[i][i] = a[i][i] + LaurentRational.const(eq.coeff)
        for coef, src in eq.rhs:
            if src in index:
                a[i][index[src]] = a[i][index[src]] - coef
            else:
                k = c.inputs.index(src)
                b[i][k] = b[i][k] + coef
    loop = delay_free_cycle(c)
    sol = _solve(a, b)
    if loop is not None:
        raise AlgebraicLoop("loop without a delay: " + " -> ".join(loop), cycle=loop)
    if sol is None:
        raise StreamLogicError("internal: singular system although every loop has a delay")
    rows = [sol[index[o]] for o in c.outputs]
    for o, row in zip(c.outputs, rows):
        for i, f in zip(c.inputs, row):
            if not f.is_zero() and valuation(f) < 0:
                raise NotCausal(f"{o} depends on future values of {i}", entry=str(f))
    return TransferMatrix(list(c.inputs), list(c.outputs), rows)


def equiv(c1: Circuit, c2: Circuit) -> bool:
    if len(c1.inputs) != len(c2.inputs) or len(c1.outputs) != len(c2.outputs):
        raise ArityMismatch(
            f"{len(c1.inputs)}x{len(c1.outputs)} versus {len(c2.inputs)}x{len(c2.outputs)}")
    return transfer(c1).entries == transfer(c2).entries


def simulate(c: Circuit, inputs: dict, steps: int) -> dict:
    """Clocked register semantics: delays emit their stored value, then
    store their current input."""
    graph = {n.name: set() if n.kind == "delay" else set(n.srcs) for n in c.nodes.values()}
    try:
        order = list(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        raise AlgebraicLoop("loop without a delay", cycle=list(exc.args[1])) from None
    regs = {n: Fraction(0) for n, node in c.nodes.items() if node.kind == "delay"}
    out = {o: [] for o in c.outputs}
    for t in range(steps):
        val: dict = {}
        for name in order:
            node = c.nodes[name]
            if node.kind == "input":
                seq = inputs[name]
                val[name] = Fraction(seq[t]) if t < len(seq) else Fraction(0)
            elif node.kind == "delay":
                val[name] = regs[name]
            elif node.kind == "add":
                val[name] = val[node.srcs[0]] + val[node.srcs[1]]
            elif node.kind == "scale":
                val[name] = node.factor * val[node.srcs[0]]
            else:
                val[name] = val[node.srcs[0]]
        for name in regs:
            regs[name] = val[c.nodes[name].srcs[0]]
        for o in c.outputs:
            out[o].append(val[o])
    return out


def predicted_outputs(c: Circuit, inputs: dict, steps: int) -> dict:
    """Outputs computed from the transfer matrix by series convolution."""
    tm = transfer(c)
    out = {}
    for r, o in enumerate(tm.outputs):
        acc = [Fraction(0)] * steps
        for k, i in enumerate(tm.inputs):
            f = coeffs(tm.entries[r][k], steps).coeffs
            seq = list(inputs[i])[:steps] + [Fraction(0)] * max(0, steps - len(inputs[i]))
            for t in range(steps):
                acc[t] += sum(f[j] * seq[t - j] for j in range(t + 1))
        out[o] = acc
    return out


# ---------------------------------------------------------------------------
# Logic encoding


def _coef_term(c: LaurentRational) -> Term:
    if c.den.degree == 0 and c.num.degree <= 0:
        return RatConst(c.num[0])
    if c == LaurentRational.X():
        return XConst()
    return StreamConst(c)


def equation_atom(eq: Equation) -> Atom:
    lhs: Term = Var(eq.target)
    if eq.coeff != 1:
        lhs = Mul(RatConst(eq.coeff), lhs)
    rhs: Term | None = None
    for c, src in eq.rhs:
        t: Term = Var(src) if c == ONE else Mul(_coef_term(c), Var(src))
        rhs = t if rhs is None else Add(rhs, t)
    return Atom(lhs, "EQ", rhs)


def encode_logic(c: Circuit, claim: Formula) -> Formula:
    """``forall <streams>. equations -> claim`` over power-series variables."""
    unknown = free_vars(claim) - set(c.nodes)
    if unknown:
        raise UnboundVariable(f"claim mentions {', '.join(sorted(unknown))}",
                              names=sorted(unknown))
    body: Formula = Implies(conj(*(equation_atom(e) for e in to_equations(c))), claim)
    for n in reversed(list(c.nodes)):
        body = Forall(n, Sort.S, body)
    return body


def transfer_claim(c: Circuit) -> Formula:
    """``output = [[transfer]] * input`` for a one-input, one-output circuit."""
    tm = transfer(c)
    if len(tm.inputs) != 1 or len(tm.outputs) != 1:
        raise ArityMismatch("transfer_claim needs exactly one input and one output")
    f = tm.entries[0][0]
    return Atom(Var(tm.outputs[0]), "EQ", Mul(StreamConst(f), Var(tm.inputs[0])))
