"""Exact angle arithmetic.

Angles are stored as *turns*, ``x = theta / (2*pi)``, so the quantities the
iteration formulae need (``[m x]``, ``{m x}``, ``E(m x)``, ``phi(m x)``) are
integer-part questions about ``m x``.  Three representations are supported:

* rational turns (``Fraction``), exact;
* quadratic surds ``c0 + sum_k c_k sqrt(d_k)`` with rational ``c_k`` and
  distinct square-free ``d_k > 1`` (``SurdSum``), exact;
* plain floats, guarded: a floor is refused when ``m x`` lies within
  ``FLOAT_GUARD`` of an integer.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Union

import numpy as np

from .errors import DomainError, PrecisionError

FLOAT_GUARD = 1e-9
# working precision (bits) of the first bracket attempt for surd floors
_START_BITS = 96


def _squarefree_split(d: int) -> tuple[int, int]:
    """Return ``(k, f)`` with ``d = k**2 * f`` and ``f`` square-free."""
    if d <= 0:
        raise DomainError(f"sqrt argument must be positive, got {d}")
    k, f, p = 1, d, 2
    while p * p <= f:
        while f % (p * p) == 0:
            f //= p * p
            k *= p
        p += 1
    return k, f


class SurdSum:
    """Exact number ``c0 + sum c_d * sqrt(d)``.

    The radicals are square-free and pairwise distinct, so the square roots
    are linearly independent over Q: the value is rational iff every
    irrational coefficient vanishes, and it is an integer only if rational.
    """

    __slots__ = ("_terms", "__weakref__")

    def __init__(self, terms=None):
        clean: dict[int, Fraction] = {}
        for d, c in dict(terms or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            k, f = _squarefree_split(int(d))
            clean[f] = clean.get(f, Fraction(0)) + c * k
            if clean[f] == 0:
                del clean[f]
        self._terms = dict(sorted(clean.items()))

    @classmethod
    def rational(cls, value) -> "SurdSum":
        return cls({1: Fraction(value)})

    @classmethod
    def sqrt(cls, d: int, coeff=1) -> "SurdSum":
        return cls({d: Fraction(coeff)})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @property
    def rational_part(self) -> Fraction:
        return self._terms.get(1, Fraction(0))

    def is_rational(self) -> bool:
        return all(d == 1 for d in self._terms)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.rational_part

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "SurdSum":
        if isinstance(other, SurdSum):
            return other
        if isinstance(other, (int, Fraction)):
            return SurdSum.rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for d, c in other._terms.items():
            terms[d] = terms.get(d, Fraction(0)) + c
        return SurdSum(terms)

    __radd__ = __add__

    def __neg__(self):
        return SurdSum({d: -c for d, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SurdSum({d: c * other for d, c in self._terms.items()})
        if isinstance(other, SurdSum):
            terms: dict[int, Fraction] = {}
            for d1, c1 in self._terms.items():
                for d2, c2 in other._terms.items():
                    g = math.gcd(d1, d2)
                    # sqrt(d1)*sqrt(d2) = g*sqrt(d1*d2/g^2)
                    f = (d1 // g) * (d2 // g)
                    terms[f] = terms.get(f, Fraction(0)) + c1 * c2 * g
            return SurdSum(terms)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    # exact comparison -------------------------------------------------
    def bracket(self, bits: int) -> tuple[int, int, int]:
        """Integers ``(lo, hi, den)`` with ``lo/den <= self <= hi/den``."""
        den_common = 1
        for c in self._terms.values():
            den_common = den_common * c.denominator // math.gcd(den_common, c.denominator)
        scale = 1 << bits
        lo = hi = 0
        for d, c in self._terms.items():
            a = c.numerator * (den_common // c.denominator)
            if d == 1:
                lo += a * scale
                hi += a * scale
                continue
            r = math.isqrt(d * scale * scale)
            # r <= sqrt(d)*scale < r + 1
            if a > 0:
                lo += a * r
                hi += a * (r + 1)
            else:
                lo += a * (r + 1)
                hi += a * r
        return lo, hi, den_common * scale

    def sign(self) -> int:
        if not self._terms:
            return 0
        if self.is_rational():
            return (self.rational_part > 0) - (self.rational_part < 0)
        bits = _START_BITS
        while True:
            lo, hi, _ = self.bracket(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def floor(self) -> int:
        if self.is_rational():
            return math.floor(self.rational_part)
        bits = _START_BITS
        while True:
            lo, hi, den = self.bracket(bits)
            if lo // den == hi // den:
                return lo // den
            bits *= 2

    def __floor__(self):
        return self.floor()

    def is_integer(self) -> bool:
        return self.is_rational() and self.rational_part.denominator == 1

    def __float__(self):
        return float(sum(float(c) * math.sqrt(d) for d, c in self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "SurdSum(0)"
        parts = []
        for d, c in self._terms.items():
            parts.append(str(c) if d == 1 else f"{c}*sqrt({d})")
        return "SurdSum(" + " + ".join(parts) + ")"

    def to_expr(self) -> str:
        """Python/sympy-parsable expression for the value."""
        if not self._terms:
            return "0"
        parts = []
        for d, c in self._terms.items():
            cs = f"({c.numerator}/{c.denominator})" if c.denominator != 1 else f"({c.numerator})"
            parts.append(cs if d == 1 else f"{cs}*sqrt({d})")
        return " + ".join(parts)


Exact = Union[int, Fraction, SurdSum]


# ---------------------------------------------------------------------------
# expression parsing for {"kind": "sqrt_expr", "expr": "2*pi*(sqrt(2)-1)"}

def _eval_node(node):
    """Evaluate to ``(pi_power, SurdSum)``."""
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise DomainError(f"unsupported constant {node.value!r}")
        # decimal literals are taken at face value, e.g. 0.5 -> 1/2
        return 0, SurdSum.rational(Fraction(str(node.value)))
    if isinstance(node, ast.Name):
        if node.id == "pi":
            return 1, SurdSum.rational(1)
        raise DomainError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        k, v = _eval_node(node.operand)
        return k, (-v if isinstance(node.op, ast.USub) else v)
    if isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id == "sqrt" and len(node.args) == 1):
            raise DomainError("only sqrt(<positive integer>) calls are allowed")
        k, v = _eval_node(node.args[0])
        if k != 0 or not v.is_rational():
            raise DomainError("sqrt argument must be a rational number")
        q = v.as_fraction()
        if q <= 0:
            raise DomainError("sqrt argument must be positive")
        # sqrt(a/b) = sqrt(a*b)/b
        return 0, SurdSum.sqrt(q.numerator * q.denominator, Fraction(1, q.denominator))
    if isinstance(node, ast.BinOp):
        ka, a = _eval_node(node.left)
        kb, b = _eval_node(node.right)
        if isinstance(node.op, (ast.Add, ast.Sub)):
            if a._terms and b._terms and ka != kb:
                raise DomainError("cannot add terms with different powers of pi")
            k = ka if a._terms else kb
            return k, (a + b if isinstance(node.op, ast.Add) else a - b)
        if isinstance(node.op, ast.Mult):
            return ka + kb, a * b
        if isinstance(node.op, ast.Div):
            if not b.is_rational() or b.as_fraction() == 0:
                raise DomainError("division only by non-zero rationals")
            return ka - kb, a / b.as_fraction()
    raise DomainError(f"unsupported expression element {ast.dump(node)}")


def parse_sqrt_expr(expr: str) -> SurdSum:
    """Parse an angle expression in radians and return its turn ``theta/(2 pi)``.

    >>> parse_sqrt_expr("2*pi*(sqrt(2)-1)")
    SurdSum(-1 + 1*sqrt(2))
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse angle expression {expr!r}") from exc
    k, value = _eval_node(tree)
    if not value._terms:
        return value
    if k != 1:
        raise DomainError(f"angle expression {expr!r} must be linear in pi")
    return value / 2


# ---------------------------------------------------------------------------
# integer parts

def _float_parts(a: float, guard: float | None = None):
    guard = FLOAT_GUARD if guard is None else guard
    if not math.isfinite(a):
        raise DomainError(f"non-finite value {a}")
    if float(a).is_integer():
        k = int(a)
        return k, 0.0, k, 0
    nearest = round(a)
    if abs(a - nearest) <= max(guard, 4 * abs(a) * np.finfo(float).eps):
        raise PrecisionError(f"{a!r} is within {guard:g} of the integer {nearest}; floor is unresolvable")
    lo = math.floor(a)
    return lo, a - lo, lo + 1, 1


def int_parts(a):
    """``([a], {a}, E(a), phi(a))`` for an exact or float argument.

    ``[a]`` is the floor, ``{a} = a - [a]``, ``E(a)`` the ceiling and
    ``phi(a) = E(a) - [a]``.  Exact inputs (int, Fraction, SurdSum) give an
    exact fractional part; floats near an integer raise ``PrecisionError``.
    """
    if isinstance(a, bool):
        raise DomainError("bool is not a number here")
    if isinstance(a, int):
        return a, 0, a, 0
    if isinstance(a, Fraction):
        lo = math.floor(a)
        if a.denominator == 1:
            return lo, Fraction(0), lo, 0
        return lo, a - lo, lo + 1, 1
    if isinstance(a, SurdSum):
        lo = a.floor()
        if a.is_integer():
            return lo, SurdSum(), lo, 0
        return lo, a - lo, lo + 1, 1
    return _float_parts(float(a))


# ---------------------------------------------------------------------------
# Angle

_KINDS = ("rational", "sqrt_expr", "float")


@dataclass(frozen=True)
class Angle:
    """An angle ``theta`` in ``(0, 2 pi)``, held as a turn ``theta / (2 pi)``.

    Use the constructors :meth:`rational`, :meth:`surd`, :meth:`from_expr`
    and :meth:`from_float` rather than the raw initializer.
    """

    kind: str
    turn: object  # Fraction | SurdSum | float
    irrational: bool = True
    expr: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown angle kind {self.kind!r}")
        t = self.turn
        if self.kind == "rational":
            if not isinstance(t, Fraction):
                raise DomainError("rational angle needs a Fraction turn")
            if not (0 < t < 1):
                raise DomainError(f"rational turn {t} outside (0, 1)")
        elif self.kind == "sqrt_expr":
            if not isinstance(t, SurdSum):
                raise DomainError("sqrt_expr angle needs a SurdSum turn")
            if not (t > 0 and t < 1):
                raise DomainError(f"turn {t!r} outside (0, 1)")
            if t.is_rational():
                # collapse to the rational variant
                object.__setattr__(self, "kind", "rational")
                object.__setattr__(self, "turn", t.as_fraction())
                object.__setattr__(self, "irrational", False)
        else:
            t = float(t)
            object.__setattr__(self, "turn", t)
            if not (0.0 < t < 1.0):
                raise DomainError(f"float turn {t} outside (0, 1)")
        if self.kind != "float":
            object.__setattr__(self, "irrational", self.kind == "sqrt_expr")

    # constructors ---------------------------------------------------------
    @classmethod
    def rational(cls, p: int, q: int) -> "Angle":
        """``theta = 2 pi p / q``; ``p/q`` must already be in lowest terms."""
        if q <= 0 or math.gcd(p, q) != 1:
            raise DomainError(f"rational angle {p}/{q} not in lowest terms with q > 0")
        return cls("rational", Fraction(p, q))

    @classmethod
    def surd(cls, turn: SurdSum) -> "Angle":
        return cls("sqrt_expr", turn)

    @classmethod
    def from_expr(cls, expr: str) -> "Angle":
        return cls("sqrt_expr", parse_sqrt_expr(expr), expr=expr)

    @classmethod
    def from_float(cls, theta: float, irrational: bool = True) -> "Angle":
        return cls("float", float(theta) / (2 * math.pi), irrational=irrational)

    @classmethod
    def from_turn(cls, turn) -> "Angle":
        if isinstance(turn, Fraction):
            return cls("rational", turn)
        if isinstance(turn, SurdSum):
            return cls("sqrt_expr", turn)
        return cls("float", float(turn))

    # values ---------------------------------------------------------------
    @property
    def value(self) -> float:
        """The angle in radians."""
        return 2 * math.pi * float(self.turn)

    def is_exact(self) -> bool:
        return self.kind != "float"

    def is_pi(self) -> bool:
        return self.kind == "rational" and self.turn == Fraction(1, 2)

    def scaled(self, m: int):
        """Exact (or float) value of ``m * theta / (2 pi)``."""
        return self.turn * m

    def parts(self, m: int):
        return int_parts(self.scaled(m))

    def floor_mul(self, m: int) -> int:
        return self.parts(m)[0]

    def resonant(self, m: int) -> bool:
        """True when ``m theta`` is a multiple of ``2 pi``."""
        return self.parts(m)[3] == 0

    def floor_multiples(self, m_max: int) -> np.ndarray:
        """``[m x]`` for ``m = 1..m_max`` as an int64 array (cached per angle)."""
        cache = self._floor_cache
        if cache.size < m_max:
            cache = _floor_table(self, m_max)
            object.__setattr__(self, "_floor_cache", cache)
        return cache[:m_max]

    def resonance_multiples(self, m_max: int) -> np.ndarray:
        """Boolean array: ``m x`` is an integer, ``m = 1..m_max``."""
        ms = np.arange(1, m_max + 1, dtype=np.int64)
        if self.kind == "rational":
            return ms % self.turn.denominator == 0
        if self.kind == "sqrt_expr":
            return np.zeros(m_max, dtype=bool)
        self.floor_multiples(m_max)  # raises PrecisionError on near-integers
        return np.zeros(m_max, dtype=bool)

    @cached_property
    def _floor_cache(self) -> np.ndarray:
        return np.zeros(0, dtype=np.int64)

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        if self.kind == "rational":
            return {"kind": "rational", "p": self.turn.numerator, "q": self.turn.denominator}
        if self.kind == "sqrt_expr":
            expr = self.expr or f"2*pi*({self.turn.to_expr()})"
            return {"kind": "sqrt_expr", "expr": expr}
        return {"kind": "float", "value": self.value, "irrational": self.irrational}

    @classmethod
    def from_json(cls, obj: dict) -> "Angle":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise DomainError(f"angle must be an object with a 'kind' field, got {obj!r}")
        kind = obj["kind"]
        if kind == "rational":
            return cls.rational(int(obj["p"]), int(obj["q"]))
        if kind == "sqrt_expr":
            return cls.from_expr(str(obj["expr"]))
        if kind == "float":
            return cls.from_float(float(obj["value"]), bool(obj.get("irrational", True)))
        raise DomainError(f"unknown angle kind {kind!r}")

    def __repr__(self):
        if self.kind == "rational":
            return f"Angle(2pi*{self.turn})"
        if self.kind == "sqrt_expr":
            return f"Angle(2pi*({self.turn.to_expr()}))"
        return f"Angle({self.value!r} rad)"


def _floor_table(angle: Angle, m_max: int) -> np.ndarray:
    out = np.empty(m_max, dtype=np.int64)
    t = angle.turn
    if angle.kind == "rational":
        ms = np.arange(1, m_max + 1, dtype=np.int64)
        return (ms * t.numerator) // t.denominator
    if angle.kind == "float":
        for m in range(1, m_max + 1):
            out[m - 1] = _float_parts(m * t)[0]
        return out
    # surd: one high-precision bracket, refined only at ambiguous m
    bits = _START_BITS + max(m_max, 1).bit_length()
    lo, hi, den = t.bracket(bits)
    for m in range(1, m_max + 1):
        a, b = (m * lo) // den, (m * hi) // den
        out[m - 1] = a if a == b else (t * m).floor()
    return out


def frac_parts_sum(angles, m: int):
    """Exact ``sum_j {m theta_j / 2 pi}`` over exact angles."""
    total = SurdSum()
    for a in angles:
        total = total + a.parts(m)[1]
    return total


__all__ = [
    "Angle",
    "SurdSum",
    "int_parts",
    "parse_sqrt_expr",
    "frac_parts_sum",
    "FLOAT_GUARD",
]
