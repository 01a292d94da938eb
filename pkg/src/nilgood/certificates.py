"""Decomposition certificates, their verifier, and the JSON wire format.

A certificate holds the summands together with witnesses (the inverse of the
unit summand, the nilpotency exponent) so that checking it needs nothing but
exact matrix arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ParseError
from .matrix import Matrix, parse_matrix

FORMAT_VERSION = 1
UNIT_IS_ZERO = "unit-is-zero"


@dataclass(frozen=True)
class NilGoodCertificate:
    """``A = N + U`` with ``N`` nilpotent and ``U`` a unit or zero.

    ``u_inverse`` is ``None`` exactly when ``U`` is the zero matrix.
    """

    N: Matrix
    U: Matrix
    nil_exponent: int
    u_inverse: Optional[Matrix]
    strategy: str = "canonical"
    route: tuple = field(default=(), compare=False)

    kind = "nil-good"


@dataclass(frozen=True)
class CleanCertificate:
    E: Matrix
    U: Matrix
    u_inverse: Matrix
    strategy: str = "clean"
    route: tuple = field(default=(), compare=False)

    kind = "clean"


@dataclass(frozen=True)
class NilGoodCleanCertificate:
    N: Matrix
    E: Matrix
    U: Matrix
    nil_exponent: int
    u_inverse: Matrix
    strategy: str = "canonical"
    route: tuple = field(default=(), compare=False)

    kind = "nil-good-clean"


Certificate = Union[NilGoodCertificate, CleanCertificate, NilGoodCleanCertificate]


@dataclass(frozen=True)
class Verification:
    ok: bool
    clause: Optional[str] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _fail(clause: str, detail: str) -> Verification:
    return Verification(False, clause, detail)


def _check_nilpotent(N: Matrix, k: int) -> Optional[Verification]:
    if not isinstance(k, int) or k < 1:
        return _fail("nil-exponent", f"nil_exponent must be a positive integer, got {k!r}")
    if not (N ** k).is_zero():
        return _fail("nilpotent", f"N^{k} is not zero")
    if (N ** (k - 1)).is_zero():
        return _fail("nil-exponent-tight", f"N^{k - 1} is already zero; claimed exponent {k} is not least")
    return None


def _check_unit(U: Matrix, U_inv: Matrix) -> Optional[Verification]:
    if U_inv.ring != U.ring or U_inv.dim != U.dim:
        return _fail("unit-witness", "inverse witness has the wrong ring or dimension")
    if not (U @ U_inv).is_identity() or not (U_inv @ U).is_identity():
        return _fail("unit-witness", "U times the inverse witness is not the identity")
    return None


def verify_certificate(A: Matrix, cert: Certificate) -> Verification:
    """Re-check every clause of ``cert`` against ``A``; report the first failure."""
    summands = [getattr(cert, name) for name in ("N", "E", "U") if hasattr(cert, name)]
    for S in summands + [m for m in (getattr(cert, "u_inverse", None),) if m is not None]:
        if S.ring != A.ring:
            return _fail("ring", f"summand over {S.ring}, matrix over {A.ring}")
        if S.dim != A.dim:
            return _fail("dimension", f"summand of dimension {S.dim}, matrix of dimension {A.dim}")

    total = summands[0]
    for S in summands[1:]:
        total = total + S
    if total != A:
        return _fail("sum-identity", "summands do not add up to the matrix")

    if isinstance(cert, NilGoodCertificate):
        bad = _check_nilpotent(cert.N, cert.nil_exponent)
        if bad is not None:
            return bad
        if cert.u_inverse is None:
            if not cert.U.is_zero():
                return _fail("unit-zero-marker", "unit-is-zero marker set but U is nonzero")
        else:
            bad = _check_unit(cert.U, cert.u_inverse)
            if bad is not None:
                return bad
    elif isinstance(cert, CleanCertificate):
        if cert.E @ cert.E != cert.E:
            return _fail("idempotent", "E^2 != E")
        bad = _check_unit(cert.U, cert.u_inverse)
        if bad is not None:
            return bad
    elif isinstance(cert, NilGoodCleanCertificate):
        bad = _check_nilpotent(cert.N, cert.nil_exponent)
        if bad is not None:
            return bad
        if cert.E @ cert.E != cert.E:
            return _fail("idempotent", "E^2 != E")
        if cert.u_inverse is None:
            return _fail("unit-witness", "nil-good clean certificates need a unit summand")
        bad = _check_unit(cert.U, cert.u_inverse)
        if bad is not None:
            return bad
    else:
        raise TypeError(f"not a certificate: {type(cert).__name__}")
    return Verification(True)


# ---------------------------------------------------------------------------
# JSON


def certificate_to_json(cert: Certificate) -> dict:
    out: dict = {
        "format": FORMAT_VERSION,
        "type": cert.kind,
        "strategy": cert.strategy,
        "ring": str(cert.U.ring),
        "dim": cert.U.dim,
    }
    for name in ("N", "E", "U"):
        if hasattr(cert, name):
            out[name] = getattr(cert, name).to_text()
    if hasattr(cert, "nil_exponent"):
        out["nil_exponent"] = cert.nil_exponent
    out["u_inverse"] = UNIT_IS_ZERO if cert.u_inverse is None else cert.u_inverse.to_text()
    if cert.route:
        out["route"] = list(cert.route)
    return out


def dumps(cert: Certificate) -> str:
    return json.dumps(certificate_to_json(cert), indent=2) + "\n"


_TYPES = {
    "nil-good": NilGoodCertificate,
    "clean": CleanCertificate,
    "nil-good-clean": NilGoodCleanCertificate,
}


def certificate_from_json(data: dict) -> Certificate:
    if data.get("format") != FORMAT_VERSION:
        raise ParseError(f"unsupported certificate format {data.get('format')!r}")
    try:
        cls = _TYPES[data["type"]]
    except KeyError:
        raise ParseError(f"unknown certificate type {data.get('type')!r}") from None

    def mat(name):
        if name not in data:
            raise ParseError(f"certificate is missing {name!r}")
        return parse_matrix(data[name])

    kwargs = {"strategy": data.get("strategy", ""), "route": tuple(data.get("route", ()))}
    inv = data.get("u_inverse")
    kwargs["u_inverse"] = None if inv == UNIT_IS_ZERO else mat("u_inverse")
    kwargs["U"] = mat("U")
    if cls is not NilGoodCertificate:
        kwargs["E"] = mat("E")
    if cls is not CleanCertificate:
        kwargs["N"] = mat("N")
        kwargs["nil_exponent"] = data.get("nil_exponent")
    return cls(**kwargs)


def loads(text: str) -> Certificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    return certificate_from_json(data)
