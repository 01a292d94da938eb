"""Rational canonical (Frobenius) form with an explicit similarity transform,
companion-block reordering, and the Fitting split into invertible and nilpotent
parts.

Every returned form satisfies ``A == Q @ F @ Q^{-1}`` exactly; this is checked
before returning and an :class:`~nilgood.errors.InternalError` is raised if it
ever fails.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from math import gcd, lcm
from typing import Optional

from .errors import InternalError, PreconditionError, UnsupportedRingError
from .matrix import (
    Matrix,
    column_space_basis,
    inverse,
    kernel_basis,
    nil_exponent,
)
from .poly import Polynomial
from .rings import RingSpec, mpq


@dataclass(frozen=True)
class CompanionBlock:
    poly: Polynomial

    def __post_init__(self):
        if self.poly.degree < 1 or not self.poly.is_monic:
            raise ValueError("companion block needs a monic polynomial of degree >= 1")

    @property
    def size(self) -> int:
        return self.poly.degree

    @property
    def constant_term(self):
        return self.poly.coeffs[0]

    @property
    def is_invertible(self) -> bool:
        return self.poly.ring.is_unit(self.constant_term)

    @property
    def is_shift(self) -> bool:
        """True for ``x**r``, whose companion matrix is the shift ``N_r``."""
        return all(c == 0 for c in self.poly.coeffs[:-1])

    def matrix(self) -> Matrix:
        return Matrix.companion(self.poly)


@dataclass(frozen=True)
class FrobeniusForm:
    blocks: tuple
    transform: Matrix
    transform_inv: Matrix
    source_dim: int

    @property
    def ring(self) -> RingSpec:
        return self.transform.ring

    def realize(self) -> Matrix:
        return Matrix.direct_sum(self.ring, [b.matrix() for b in self.blocks])

    def offsets(self) -> list[int]:
        out, off = [], 0
        for b in self.blocks:
            out.append(off)
            off += b.size
        return out

    def to_json(self) -> dict:
        return {
            "ring": str(self.ring),
            "blocks": [b.poly.to_list() for b in self.blocks],
            "transform": self.transform.to_text(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


@dataclass(frozen=True)
class FittingDecomposition:
    """``A = Q (U_A ⊕ N_A) Q^{-1}``; an empty part is ``None``."""

    transform: Matrix
    transform_inv: Matrix
    unit_part: Optional[Matrix]
    nil_part: Optional[Matrix]

    @property
    def unit_dim(self) -> int:
        return 0 if self.unit_part is None else self.unit_part.dim

    def realize(self) -> Matrix:
        parts = [p for p in (self.unit_part, self.nil_part) if p is not None]
        return Matrix.direct_sum(self.transform.ring, parts)


def _require_field(ring: RingSpec) -> None:
    if not ring.is_field:
        raise UnsupportedRingError(f"canonical forms need a field; {ring} has zero divisors")


# ---------------------------------------------------------------------------
# raw polynomial helpers (lists of ring values, lowest degree first, trimmed)


def _ptrim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _pdeg(p: list) -> int:
    return len(p) - 1


def _psub_scaled(R: RingSpec, a: list, q: list, b: list) -> list:
    """``a - q*b``."""
    if not q or not b:
        return a
    out = list(a) + [R.zero] * max(0, len(q) + len(b) - 1 - len(a))
    for i, x in enumerate(q):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = R.sub(out[i + j], R.mul(x, y))
    return _ptrim(out)


def _padd_scaled(R: RingSpec, a: list, q: list, b: list) -> list:
    """``a + q*b``."""
    return _psub_scaled(R, a, [R.neg(x) for x in q], b)


def _pdivmod(R: RingSpec, a: list, b: list) -> tuple[list, list]:
    inv = R.inv(b[-1])
    rem = list(a)
    d = len(b) - 1
    quot = [R.zero] * max(len(rem) - d, 0)
    for k in range(len(rem) - 1, d - 1, -1):
        c = rem[k]
        if c == 0:
            continue
        q = R.mul(c, inv)
        quot[k - d] = q
        for i, y in enumerate(b):
            rem[k - d + i] = R.sub(rem[k - d + i], R.mul(q, y))
    return _ptrim(quot), _ptrim(rem)


def _pscale(R: RingSpec, a: list, c) -> list:
    return [R.mul(c, x) for x in a]


# ---------------------------------------------------------------------------
# Smith form of xI - A


def _smith_xI_minus_A(A: Matrix) -> tuple[list[list], list[list[list]]]:
    """Diagonalise ``xI - A`` over ``k[x]``.

    Returns the invariant factors (monic, in divisibility order) and the
    inverse ``L^{-1}`` of the accumulated left unimodular transform ``L``.
    Pivots are chosen by least degree, ties broken by leftmost column and then
    topmost row.  Column operations are applied but not recorded.
    """
    R = A.ring
    n = A.dim
    M = [[[R.neg(A.rows[i][j])] if i != j else [R.neg(A.rows[i][i]), R.one] for j in range(n)] for i in range(n)]
    M = [[_ptrim(p) for p in row] for row in M]
    Linv = [[[R.one] if i == j else [] for j in range(n)] for i in range(n)]

    def row_addmul(i, k, q):
        # row_i -= q * row_k ; Linv: col_k += q * col_i
        M[i] = [_psub_scaled(R, a, q, b) for a, b in zip(M[i], M[k])]
        for r in range(n):
            if Linv[r][i]:
                Linv[r][k] = _padd_scaled(R, Linv[r][k], q, Linv[r][i])

    for t in range(n):
        while True:
            best = None
            for j in range(t, n):
                for i in range(t, n):
                    p = M[i][j]
                    if p and (best is None or len(p) < best[0]):
                        best = (len(p), i, j)
            if best is None:
                raise InternalError("xI - A became singular during Smith reduction")
            _, pi, pj = best
            if pi != t:
                M[t], M[pi] = M[pi], M[t]
                for r in range(n):
                    Linv[r][t], Linv[r][pi] = Linv[r][pi], Linv[r][t]
            if pj != t:
                for r in range(n):
                    M[r][t], M[r][pj] = M[r][pj], M[r][t]
            piv = M[t][t]
            dirty = False
            for i in range(t + 1, n):
                if M[i][t]:
                    q, rem = _pdivmod(R, M[i][t], piv)
                    row_addmul(i, t, q)
                    if rem:
                        dirty = True
            for j in range(t + 1, n):
                if M[t][j]:
                    q, rem = _pdivmod(R, M[t][j], piv)
                    for r in range(t, n):
                        M[r][j] = _psub_scaled(R, M[r][j], q, M[r][t])
                    if rem:
                        dirty = True
            if dirty:
                continue
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, n):
                    if M[i][j] and _pdivmod(R, M[i][j], piv)[1]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # row_t += row_bad brings a non-multiple into the pivot row
            row_addmul(t, bad, [R.neg(R.one)])
        lead_inv = R.inv(M[t][t][-1])
        if lead_inv != 1:
            M[t] = [_pscale(R, p, lead_inv) for p in M[t]]
            lead = R.inv(lead_inv)
            for r in range(n):
                Linv[r][t] = _pscale(R, Linv[r][t], lead)
    factors = [M[t][t] for t in range(n)]
    return factors, Linv


def _eval_poly_vector(A: Matrix, polys: list[list]) -> tuple:
    """``sum_k p_k(A) e_k`` by Horner's rule."""
    R = A.ring
    n = A.dim
    D = max((len(p) for p in polys), default=0)
    v = tuple([R.zero] * n)
    for d in range(D - 1, -1, -1):
        v = A.apply(v)
        v = tuple(R.add(v[k], polys[k][d]) if d < len(polys[k]) else v[k] for k in range(n))
    return v


def _primitive(R: RingSpec, v: tuple) -> tuple:
    """Over Q, rescale ``v`` to a primitive integer vector.  A nonzero multiple
    of a cyclic generator spans the same block, and the smaller entries keep
    the transform cheap to invert and multiply."""
    if R.modulus is not None:
        return v
    den = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, ints, 0)
    if g in (0, 1) and den == 1:
        return v
    return tuple(R.normalize(mpq(x, g)) for x in ints)


def _verify_similarity(A: Matrix, Q: Matrix, F: Matrix, what: str) -> Matrix:
    Q_inv = inverse(Q)
    if Q_inv is None:
        raise InternalError(f"{what}: transform is singular")
    if A @ Q != Q @ F:
        raise InternalError(f"{what}: A·Q != Q·F")
    return Q_inv


def _cyclic_form(A: Matrix, tries: int = 2) -> Optional[FrobeniusForm]:
    """Single-block shortcut: if ``e_j`` is a cyclic vector, its Krylov basis
    already conjugates ``A`` to the companion matrix of its characteristic
    polynomial.  This skips the polynomial Smith reduction, whose rational
    coefficients grow quickly with the dimension."""
    R = A.ring
    n = A.dim
    for j in sorted({0, n - 1})[:tries]:
        v = tuple(R.one if k == j else R.zero for k in range(n))
        cols = [v]
        for _ in range(n - 1):
            cols.append(A.apply(cols[-1]))
        Q = Matrix.from_columns(R, cols)
        Q_inv = inverse(Q)
        if Q_inv is None:
            continue
        w = Q_inv.apply(A.apply(cols[-1]))
        block = CompanionBlock(Polynomial._raw(R, [R.neg(c) for c in w] + [R.one]))
        if A @ Q != Q @ block.matrix():
            raise InternalError("frobenius_form: Krylov basis does not conjugate A to its companion")
        return FrobeniusForm((block,), Q, Q_inv, n)
    return None


def frobenius_form(A: Matrix) -> FrobeniusForm:
    """Invariant-factor companion blocks of ``A`` and a transform ``Q`` with ``A = Q F Q^{-1}``."""
    R = A.ring
    _require_field(R)
    n = A.dim
    fast = _cyclic_form(A)
    if fast is not None:
        return fast
    factors, Linv = _smith_xI_minus_A(A)
    blocks = []
    cols = []
    for t, d in enumerate(factors):
        if len(d) <= 1:
            continue
        v = _primitive(R, _eval_poly_vector(A, [Linv[k][t] for k in range(n)]))
        for _ in range(len(d) - 1):
            cols.append(v)
            v = A.apply(v)
        blocks.append(CompanionBlock(Polynomial._raw(R, d)))
    Q = Matrix.from_columns(R, cols)
    form_blocks = tuple(blocks)
    F = Matrix.direct_sum(R, [b.matrix() for b in form_blocks])
    Q_inv = _verify_similarity(A, Q, F, "frobenius_form")
    return FrobeniusForm(form_blocks, Q, Q_inv, n)


def permute_blocks(form: FrobeniusForm, order: list[int]) -> FrobeniusForm:
    """Reorder the blocks, permuting the transform's basis vectors to match."""
    R = form.ring
    offs = form.offsets()
    cols = form.transform.columns()
    new_cols = []
    for k in order:
        new_cols.extend(cols[offs[k]:offs[k] + form.blocks[k].size])
    Q = Matrix.from_columns(R, new_cols)
    # permuting the columns of Q permutes the rows of its inverse the same way
    inv_rows = form.transform_inv.rows
    new_rows = []
    for k in order:
        new_rows.extend(inv_rows[offs[k]:offs[k] + form.blocks[k].size])
    Q_inv = Matrix(R, new_rows)
    if not (Q_inv @ Q).is_identity():
        raise InternalError("reorder_blocks: permuted transform lost its inverse")
    blocks = tuple(form.blocks[k] for k in order)
    return FrobeniusForm(blocks, Q, Q_inv, form.source_dim)


def reorder_blocks(form: FrobeniusForm) -> FrobeniusForm:
    """Invertible blocks first (original order), then zero-constant blocks by
    decreasing size, so the ``x`` blocks collect into a trailing zero block."""
    inv = [k for k, b in enumerate(form.blocks) if b.is_invertible]
    sing = [k for k, b in enumerate(form.blocks) if not b.is_invertible]
    sing.sort(key=lambda k: -form.blocks[k].size)
    return permute_blocks(form, inv + sing)


def fitting_decompose(A: Matrix) -> FittingDecomposition:
    """Split ``A`` along ``image(A^n) ⊕ kernel(A^n)``."""
    R = A.ring
    _require_field(R)
    n = A.dim
    An = A ** n
    img = column_space_basis(An)
    ker = kernel_basis(An)
    m = len(img)
    Q = Matrix.from_columns(R, img + ker)
    Q_inv = inverse(Q)
    if Q_inv is None:
        raise InternalError("fitting_decompose: image and kernel do not span")
    B = Q_inv @ A @ Q
    for i in range(n):
        for j in range(n):
            if (i < m) != (j < m) and B.rows[i][j] != 0:
                raise InternalError("fitting_decompose: split is not block diagonal")
    U_A = B.submatrix(0, m) if m else None
    N_A = B.submatrix(m, n) if m < n else None
    if U_A is not None and inverse(U_A) is None:
        raise InternalError("fitting_decompose: unit part is singular")
    if N_A is not None and nil_exponent(N_A) is None:
        raise InternalError("fitting_decompose: nil part is not nilpotent")
    return FittingDecomposition(Q, Q_inv, U_A, N_A)


def nilpotent_shift_form(N: Matrix) -> FrobeniusForm:
    """Shift-block form ``N = Q (N_{r_1} ⊕ ... ⊕ N_{r_k}) Q^{-1}`` of a nilpotent matrix."""
    _require_field(N.ring)
    if nil_exponent(N) is None:
        raise PreconditionError("nilpotent_shift_form: input is not nilpotent")
    form = frobenius_form(N)
    if not all(b.is_shift for b in form.blocks):
        raise InternalError("nilpotent_shift_form: non-shift block in a nilpotent form")
    return form
