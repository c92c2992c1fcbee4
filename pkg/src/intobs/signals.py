"""Scalar signals built from constants and single-frequency sinusoids.

Grammar (whitespace is ignored)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := number | number '*' trig | trig
    trig   := ('sin'|'cos') '(' number '*t' (('+'|'-') number)? ')'

``number`` is an unsigned decimal literal with an optional exponent. The
frequency may carry a leading sign, e.g. ``sin(-2*t)``.
"""
import re
from dataclasses import dataclass

import numpy as np

from .errors import OrderingError, SignalSyntaxError

RNG_ALGORITHM = "PCG64"

_KINDS = ("const", "sin", "cos")
_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


@dataclass(frozen=True)
class Term:
    amplitude: float
    kind: str = "const"
    frequency: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown term kind {self.kind!r}")
        if not np.all(np.isfinite([self.amplitude, self.frequency, self.phase])):
            raise ValueError("signal terms must be finite")
        if self.kind == "const" and (self.frequency != 0.0 or self.phase != 0.0):
            raise ValueError("constant terms carry no frequency or phase")


@dataclass(frozen=True)
class SignalExpr:
    terms: tuple

    def __post_init__(self):
        if not self.terms:
            object.__setattr__(self, "terms", (Term(0.0),))

    def __call__(self, t):
        return eval_signal(self, t)

    def __str__(self):
        return format_signal(self)

    @classmethod
    def constant(cls, value):
        return cls((Term(float(value)),))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def fail(self, message):
        raise SignalSyntaxError(message, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, token):
        self.skip()
        if not self.text.startswith(token, self.pos):
            self.fail(f"expected {token!r}")
        self.pos += len(token)

    def number(self):
        self.skip()
        m = _NUMBER.match(self.text, self.pos)
        if m is None:
            self.fail("expected a number")
        self.pos = m.end()
        return float(m.group())

    def sign(self):
        """Consume an optional '+' or '-' and return it as +-1."""
        c = self.peek()
        if c in ("+", "-"):
            self.pos += 1
            return -1.0 if c == "-" else 1.0
        return 1.0

    def signed_number(self):
        return self.sign() * self.number()

    def trig(self, amplitude):
        self.skip()
        kind = self.text[self.pos:self.pos + 3]
        self.pos += 3
        self.expect("(")
        freq = self.signed_number()
        self.expect("*")
        self.expect("t")
        phase = 0.0
        if self.peek() in ("+", "-"):
            phase = self.signed_number()
        self.expect(")")
        return Term(amplitude, kind, freq, phase)

    def term(self, sign):
        self.skip()
        if self.text.startswith(("sin", "cos"), self.pos):
            return self.trig(sign)
        value = sign * self.number()
        if self.peek() == "*":
            self.pos += 1
            self.skip()
            if not self.text.startswith(("sin", "cos"), self.pos):
                self.fail("expected 'sin' or 'cos'")
            return self.trig(value)
        return Term(value)

    def parse(self):
        terms = [self.term(self.sign())]
        while True:
            c = self.peek()
            if c == "":
                break
            if c not in ("+", "-"):
                self.fail("expected '+', '-' or end of input")
            self.pos += 1
            terms.append(self.term(-1.0 if c == "-" else 1.0))
        return SignalExpr(tuple(terms))


def parse_signal(text):
    """Parse ``text`` into a :class:`SignalExpr`; raises SignalSyntaxError."""
    if not isinstance(text, str):
        # plain numbers are accepted as constants
        return SignalExpr.constant(float(text))
    return _Parser(text).parse()


def _fmt(x):
    return repr(float(x))


def format_signal(expr):
    """Render ``expr`` in the grammar accepted by :func:`parse_signal`."""
    out = []
    for i, term in enumerate(expr.terms):
        amp = term.amplitude
        neg = np.signbit(amp)
        if i == 0:
            head = "-" if neg else ""
        else:
            head = " - " if neg else " + "
        mag = _fmt(abs(amp))
        if term.kind == "const":
            body = mag
        else:
            arg = f"{_fmt(term.frequency)}*t"
            if term.phase != 0.0 or np.signbit(term.phase):
                arg += (" - " if np.signbit(term.phase) else " + ") + _fmt(abs(term.phase))
            body = f"{mag}*{term.kind}({arg})"
        out.append(head + body)
    return "".join(out)


def eval_signal(expr, t):
    """Evaluate at time ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for term in expr.terms:
        if term.kind == "const":
            total = total + term.amplitude
        elif term.kind == "sin":
            total = total + term.amplitude * np.sin(term.frequency * t + term.phase)
        else:
            total = total + term.amplitude * np.cos(term.frequency * t + term.phase)
    return total if total.ndim else float(total)


@dataclass(frozen=True)
class VectorSignal:
    components: tuple

    def __post_init__(self):
        if len(self.components) == 0:
            raise ValueError("a vector signal needs at least one component")

    @property
    def dim(self):
        return len(self.components)

    def __call__(self, t):
        return np.array([eval_signal(c, t) for c in self.components], dtype=float)

    def to_strings(self):
        return [format_signal(c) for c in self.components]


def vector_signal(items):
    """Build a VectorSignal from strings, numbers or SignalExpr objects."""
    comps = []
    for item in items:
        comps.append(item if isinstance(item, SignalExpr) else parse_signal(item))
    return VectorSignal(tuple(comps))


def zero_signal(dim):
    return VectorSignal(tuple(SignalExpr.constant(0.0) for _ in range(dim)))


def sample_in_box(lower, upper, state):
    """Draw one value uniformly in ``[lower, upper]``.

    ``state`` is either an integer seed or a PCG64 state dictionary as
    returned by a previous call. Returns ``(value, next_state)``.
    """
    if lower > upper:
        raise OrderingError(f"sample_in_box got lower={lower} > upper={upper}")
    if isinstance(state, dict):
        bitgen = np.random.PCG64()
        bitgen.state = state
    else:
        bitgen = np.random.PCG64(state)
    u = np.random.Generator(bitgen).random()
    value = min(max(lower + (upper - lower) * u, lower), upper)
    return value, bitgen.state


def sample_box(lower, upper, rng, size=None):
    """Vectorized draws inside ``[lower, upper]`` from a numpy Generator."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(lower > upper):
        raise OrderingError("sample_box got lower > upper")
    shape = np.broadcast_shapes(lower.shape, upper.shape) if size is None else size
    u = rng.random(shape)
    # rounding in lower + width*u can overshoot by an ulp
    return np.clip(lower + (upper - lower) * u, lower, upper)
