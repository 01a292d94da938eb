"""Univariate polynomials over a :class:`~nilgood.rings.RingSpec`.

Coefficients are stored lowest degree first with no trailing zeros, so the
zero polynomial has an empty coefficient tuple.
"""

from __future__ import annotations

from .errors import DomainMismatchError, UnsupportedRingError
from .rings import RingSpec


def _trim(coeffs: list) -> list:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class Polynomial:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: RingSpec, coeffs=()):
        self.ring = ring
        self.coeffs = tuple(_trim([ring.normalize(c) for c in coeffs]))

    @classmethod
    def _raw(cls, ring, coeffs) -> "Polynomial":
        # coeffs already normalized
        p = cls.__new__(cls)
        p.ring = ring
        p.coeffs = tuple(_trim(list(coeffs)))
        return p

    @classmethod
    def x(cls, ring: RingSpec) -> "Polynomial":
        return cls._raw(ring, [ring.zero, ring.one])

    @classmethod
    def constant(cls, ring: RingSpec, c) -> "Polynomial":
        return cls(ring, [c])

    @classmethod
    def from_roots(cls, ring: RingSpec, roots) -> "Polynomial":
        p = cls.constant(ring, 1)
        for r in roots:
            p = p * cls(ring, [ring.neg(ring.normalize(r)), 1])
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else self.ring.zero

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.ring.zero

    def _check(self, other: "Polynomial") -> None:
        if self.ring != other.ring:
            raise DomainMismatchError(f"polynomials over {self.ring} and {other.ring}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ring, self.coeffs))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        R = self.ring
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial._raw(R, [R.add(self.coeff(i), other.coeff(i)) for i in range(n)])

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.ring, [self.ring.neg(c) for c in self.coeffs])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        R = self.ring
        if not self.coeffs or not other.coeffs:
            return Polynomial._raw(R, [])
        out = [R.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = R.add(out[i + j], R.mul(a, b))
        return Polynomial._raw(R, out)

    def scale(self, c) -> "Polynomial":
        R = self.ring
        return Polynomial._raw(R, [R.mul(c, a) for a in self.coeffs])

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Euclidean division; the divisor's leading coefficient must be a unit."""
        self._check(other)
        R = self.ring
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        inv_lead = R.inv(other.lead)
        if inv_lead is None:
            raise UnsupportedRingError(f"leading coefficient {other.lead} is not a unit in {R}")
        rem = list(self.coeffs)
        d = other.degree
        quot = [R.zero] * max(len(rem) - d, 0)
        for k in range(len(rem) - 1, d - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            q = R.mul(c, inv_lead)
            quot[k - d] = q
            for i, b in enumerate(other.coeffs):
                rem[k - d + i] = R.sub(rem[k - d + i], R.mul(q, b))
        return Polynomial._raw(R, quot), Polynomial._raw(R, rem)

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[0]

    def divides(self, other: "Polynomial") -> bool:
        return (other % self).is_zero

    def monic(self) -> "Polynomial":
        if self.is_zero:
            return self
        return self.scale(self.ring.inv(self.lead))

    def __call__(self, x):
        R = self.ring
        acc = R.zero
        for c in reversed(self.coeffs):
            acc = R.add(R.mul(acc, x), c)
        return acc

    def evaluate_matrix(self, A):
        """``p(A)`` by Horner's rule."""
        from .matrix import Matrix

        acc = Matrix.zeros(A.ring, A.dim)
        I = Matrix.identity(A.ring, A.dim)
        for c in reversed(self.coeffs):
            acc = acc @ A + I.scale(c)
        return acc

    def to_list(self) -> list[str]:
        return [self.ring.format_scalar(c) for c in self.coeffs]

    def __repr__(self) -> str:
        return f"Polynomial({self.ring}, {self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        fmt = self.ring.format_scalar
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(fmt(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{fmt(c)}*{mono}")
        return " + ".join(terms)
