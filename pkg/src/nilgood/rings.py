"""Exact scalar domains: prime fields GF(p), modular rings Z/m and the rationals.

A :class:`RingSpec` knows how to do arithmetic on *raw* values (``int`` for the
modular kinds, ``gmpy2.mpq`` for the rationals).  Matrices and
polynomials store raw values and delegate to their ring, which keeps the inner
loops free of wrapper objects.  :class:`Scalar` is the value-level wrapper for
callers that want ring-tagged elements.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Union

from gmpy2 import mpq

from .errors import DomainMismatchError, ParseError

PRIME_FIELD = "prime-field"
MODULAR = "modular"
RATIONAL = "rational"

Raw = Union[int, "mpq"]

_MPQ = type(mpq(0))
Q_ZERO = mpq(0)
Q_ONE = mpq(1)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class RingSpec:
    kind: str
    modulus: Optional[int] = None

    def __post_init__(self):
        if self.kind == PRIME_FIELD:
            if self.modulus is None or not is_prime(self.modulus):
                raise ValueError(f"gf({self.modulus}): modulus must be prime")
        elif self.kind == MODULAR:
            if self.modulus is None or self.modulus < 2:
                raise ValueError(f"zmod({self.modulus}): modulus must be >= 2")
        elif self.kind == RATIONAL:
            if self.modulus is not None:
                raise ValueError("rational ring takes no modulus")
        else:
            raise ValueError(f"unknown ring kind {self.kind!r}")

    # -- construction -----------------------------------------------------

    @classmethod
    def gf(cls, p: int) -> "RingSpec":
        return cls(PRIME_FIELD, p)

    @classmethod
    def zmod(cls, m: int) -> "RingSpec":
        return cls(MODULAR, m)

    @classmethod
    def rational(cls) -> "RingSpec":
        return cls(RATIONAL)

    @classmethod
    def parse(cls, text: str) -> "RingSpec":
        """Parse ``gf(p)``, ``zmod(m)`` or ``rational``."""
        s = text.strip().lower()
        if s in ("rational", "q", "qq"):
            return cls.rational()
        m = re.fullmatch(r"(gf|zmod)\s*[(:]\s*(\d+)\s*\)?", s)
        if not m:
            raise ParseError(f"bad ring spec {text!r}; expected gf(p), zmod(m) or rational")
        kind = PRIME_FIELD if m.group(1) == "gf" else MODULAR
        try:
            return cls(kind, int(m.group(2)))
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    def __str__(self) -> str:
        if self.kind == PRIME_FIELD:
            return f"gf({self.modulus})"
        if self.kind == MODULAR:
            return f"zmod({self.modulus})"
        return "rational"

    # -- classification ---------------------------------------------------

    @property
    def is_field(self) -> bool:
        return self.kind != MODULAR or is_prime(self.modulus)

    @property
    def is_finite(self) -> bool:
        return self.kind != RATIONAL

    @cached_property
    def max_nil_exponent(self) -> int:
        """Largest nilpotency exponent of an element (max prime exponent of m)."""
        if self.kind != MODULAR:
            return 1
        return max(factorize(self.modulus).values())

    @cached_property
    def _radical(self) -> int:
        # product of the distinct primes dividing m
        return math.prod(factorize(self.modulus)) if self.kind == MODULAR else 0

    # -- raw arithmetic ---------------------------------------------------

    @property
    def zero(self) -> Raw:
        return Q_ZERO if self.kind == RATIONAL else 0

    @property
    def one(self) -> Raw:
        return Q_ONE if self.kind == RATIONAL else 1

    def normalize(self, x) -> Raw:
        if self.kind == RATIONAL:
            return x if type(x) is _MPQ else mpq(x)
        if not isinstance(x, int):
            x = Fraction(int(x.numerator), int(x.denominator))
            if x.denominator == 1:
                return x.numerator % self.modulus
            den = pow(x.denominator, -1, self.modulus)
            return (x.numerator * den) % self.modulus
        return int(x) % self.modulus

    def add(self, x: Raw, y: Raw) -> Raw:
        if self.modulus is None:
            return x + y
        return (x + y) % self.modulus

    def sub(self, x: Raw, y: Raw) -> Raw:
        if self.modulus is None:
            return x - y
        return (x - y) % self.modulus

    def mul(self, x: Raw, y: Raw) -> Raw:
        if self.modulus is None:
            return x * y
        return (x * y) % self.modulus

    def neg(self, x: Raw) -> Raw:
        if self.modulus is None:
            return -x
        return (-x) % self.modulus

    def inv(self, x: Raw) -> Optional[Raw]:
        """Multiplicative inverse, or ``None`` when ``x`` is not a unit."""
        if self.modulus is None:
            return None if x == 0 else 1 / x
        if math.gcd(x, self.modulus) != 1:
            return None
        return pow(x, -1, self.modulus)

    def is_unit(self, x: Raw) -> bool:
        if self.modulus is None:
            return x != 0
        return math.gcd(x, self.modulus) == 1

    def is_nilpotent(self, x: Raw) -> bool:
        if self.kind == MODULAR:
            return x % self._radical == 0
        return x == 0

    def nil_exponent(self, x: Raw) -> Optional[int]:
        """Least ``k >= 1`` with ``x**k == 0``, or ``None``."""
        if not self.is_nilpotent(x):
            return None
        k, p = 1, x
        while p != 0:
            p = self.mul(p, x)
            k += 1
        return k

    def is_idempotent(self, x: Raw) -> bool:
        return self.mul(x, x) == x

    def elements(self):
        """All raw elements of a finite ring, in increasing order."""
        if not self.is_finite:
            raise ValueError("rational ring is infinite")
        return range(self.modulus)

    # -- text I/O ---------------------------------------------------------

    def parse_scalar(self, token: str) -> Raw:
        try:
            if "/" in token:
                return self.normalize(Fraction(token))
            return self.normalize(int(token))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad scalar literal {token!r} for {self}") from None

    def format_scalar(self, x: Raw) -> str:
        if self.kind == RATIONAL:
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return str(x)

    def scalar(self, value) -> "Scalar":
        return Scalar(self, self.normalize(value))


def _check_same(x: "Scalar", y: "Scalar") -> None:
    if x.ring != y.ring:
        raise DomainMismatchError(f"cannot combine scalars of {x.ring} and {y.ring}")


@dataclass(frozen=True)
class Scalar:
    """A ring element in canonical form, tagged with its ring."""

    ring: RingSpec
    value: Raw

    def __post_init__(self):
        object.__setattr__(self, "value", self.ring.normalize(self.value))

    def __add__(self, other: "Scalar") -> "Scalar":
        _check_same(self, other)
        return Scalar(self.ring, self.ring.add(self.value, other.value))

    def __sub__(self, other: "Scalar") -> "Scalar":
        _check_same(self, other)
        return Scalar(self.ring, self.ring.sub(self.value, other.value))

    def __mul__(self, other: "Scalar") -> "Scalar":
        _check_same(self, other)
        return Scalar(self.ring, self.ring.mul(self.value, other.value))

    def __neg__(self) -> "Scalar":
        return Scalar(self.ring, self.ring.neg(self.value))

    def inverse(self) -> Optional["Scalar"]:
        inv = self.ring.inv(self.value)
        return None if inv is None else Scalar(self.ring, inv)

    def predicates(self) -> dict:
        return scalar_predicates(self)

    def __str__(self) -> str:
        return self.ring.format_scalar(self.value)


def scalar_arith(x: Scalar, y: Scalar, op: str) -> Scalar:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown op {op!r}")


def scalar_inverse(x: Scalar) -> Optional[Scalar]:
    return x.inverse()


def scalar_predicates(x: Scalar) -> dict:
    ring, v = x.ring, x.value
    return {
        "is_unit": ring.is_unit(v),
        "is_nilpotent": ring.is_nilpotent(v),
        "is_idempotent": ring.is_idempotent(v),
        "nilpotency_exponent": ring.nil_exponent(v),
    }
