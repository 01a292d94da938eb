"""Dense square matrices with exact entries.

Matrices are immutable.  Entries are raw ring values (see :mod:`nilgood.rings`)
stored row-major as a tuple of tuples.  Indices in the public API are 0-based.
"""

from __future__ import annotations

from functools import reduce
from math import lcm
from typing import Iterable, Optional, Sequence

from .errors import (
    DomainMismatchError,
    NotInvertibleError,
    ParseError,
    UnsupportedRingError,
)
from .poly import Polynomial
from .rings import MODULAR, Q_ZERO, RingSpec, mpq


def _integer_rows(rows):
    # scale each row by the lcm of its denominators
    out = []
    for r in rows:
        d = reduce(lcm, (a.denominator for a in r), 1)
        out.append((d, [a.numerator * (d // a.denominator) for a in r]))
    return out


def _rational_matmul(rows, cols) -> tuple:
    left = _integer_rows(rows)
    right = _integer_rows(cols)
    return tuple(
        tuple(mpq(sum(a * b for a, b in zip(r, c)), dr * dc) for dc, c in right)
        for dr, r in left
    )


class Matrix:
    __slots__ = ("ring", "rows", "_hash")

    def __init__(self, ring: RingSpec, rows: Iterable[Iterable]):
        rows = tuple(tuple(ring.normalize(x) for x in r) for r in rows)
        n = len(rows)
        if n == 0:
            raise ValueError("matrix dimension must be >= 1")
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.ring = ring
        self.rows = rows
        self._hash = None

    @classmethod
    def _raw(cls, ring: RingSpec, rows) -> "Matrix":
        m = cls.__new__(cls)
        m.ring = ring
        m.rows = rows if isinstance(rows, tuple) else tuple(tuple(r) for r in rows)
        m._hash = None
        return m

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, ring: RingSpec, n: int) -> "Matrix":
        z = ring.zero
        return cls._raw(ring, tuple((z,) * n for _ in range(n)))

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "Matrix":
        z, o = ring.zero, ring.one
        return cls._raw(ring, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def unit(cls, ring: RingSpec, n: int, i: int, j: int, value=1) -> "Matrix":
        """The matrix with ``value`` at ``(i, j)`` and zeros elsewhere."""
        rows = [[ring.zero] * n for _ in range(n)]
        rows[i][j] = ring.normalize(value)
        return cls._raw(ring, rows)

    @classmethod
    def shift(cls, ring: RingSpec, n: int) -> "Matrix":
        """The nilpotent shift ``N_n``: ones on the subdiagonal."""
        rows = [[ring.zero] * n for _ in range(n)]
        for i in range(1, n):
            rows[i][i - 1] = ring.one
        return cls._raw(ring, rows)

    @classmethod
    def companion(cls, poly: Polynomial) -> "Matrix":
        """Companion matrix of a monic polynomial.

        Subdiagonal ones, last column ``(-c_0, ..., -c_{m-1})``.
        """
        R = poly.ring
        m = poly.degree
        if m < 1 or not poly.is_monic:
            raise ValueError("companion matrix needs a monic polynomial of degree >= 1")
        rows = [[R.zero] * m for _ in range(m)]
        for i in range(1, m):
            rows[i][i - 1] = R.one
        for i in range(m):
            rows[i][m - 1] = R.neg(poly.coeffs[i])
        return cls._raw(R, rows)

    @classmethod
    def direct_sum(cls, ring: RingSpec, blocks: Sequence["Matrix"]) -> "Matrix":
        n = sum(b.dim for b in blocks)
        rows = [[ring.zero] * n for _ in range(n)]
        off = 0
        for b in blocks:
            if b.ring != ring:
                raise DomainMismatchError(f"block over {b.ring}, expected {ring}")
            for i, r in enumerate(b.rows):
                rows[off + i][off:off + b.dim] = r
            off += b.dim
        return cls._raw(ring, rows)

    @classmethod
    def permutation(cls, ring: RingSpec, perm: Sequence[int]) -> "Matrix":
        """Matrix sending basis vector ``e_j`` to ``e_perm[j]``."""
        n = len(perm)
        rows = [[ring.zero] * n for _ in range(n)]
        for j, i in enumerate(perm):
            rows[i][j] = ring.one
        return cls._raw(ring, rows)

    @classmethod
    def from_columns(cls, ring: RingSpec, cols: Sequence[Sequence]) -> "Matrix":
        return cls._raw(ring, tuple(zip(*cols)))

    # -- basic accessors --------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def columns(self) -> list[tuple]:
        return list(zip(*self.rows))

    def to_lists(self) -> list[list]:
        return [list(r) for r in self.rows]

    def submatrix(self, r0: int, r1: int, c0: Optional[int] = None, c1: Optional[int] = None) -> "Matrix":
        if c0 is None:
            c0, c1 = r0, r1
        if r1 - r0 != c1 - c0:
            raise ValueError("submatrix must be square")
        return Matrix._raw(self.ring, tuple(r[c0:c1] for r in self.rows[r0:r1]))

    def with_entries(self, updates: dict) -> "Matrix":
        rows = self.to_lists()
        for (i, j), v in updates.items():
            rows[i][j] = self.ring.normalize(v)
        return Matrix._raw(self.ring, rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ring == other.ring and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, self.rows))
        return self._hash

    def __repr__(self) -> str:
        return f"Matrix({self.ring}, {[list(map(self.ring.format_scalar, r)) for r in self.rows]})"

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_identity(self) -> bool:
        return all(x == (1 if i == j else 0) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "Matrix") -> None:
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if self.ring != other.ring:
            raise DomainMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")
        if self.dim != other.dim:
            raise DomainMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        m = self.ring.modulus
        if m is None:
            rows = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        else:
            rows = tuple(tuple((a + b) % m for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return Matrix._raw(self.ring, rows)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        m = self.ring.modulus
        if m is None:
            rows = tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        else:
            rows = tuple(tuple((a - b) % m for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return Matrix._raw(self.ring, rows)

    def __neg__(self) -> "Matrix":
        neg = self.ring.neg
        return Matrix._raw(self.ring, tuple(tuple(neg(a) for a in r) for r in self.rows))

    def scale(self, c) -> "Matrix":
        mul = self.ring.mul
        c = self.ring.normalize(c)
        return Matrix._raw(self.ring, tuple(tuple(mul(c, a) for a in r) for r in self.rows))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        cols = list(zip(*other.rows))
        m = self.ring.modulus
        if m is None:
            rows = _rational_matmul(self.rows, cols)
        else:
            rows = tuple(tuple(sum(a * b for a, b in zip(r, c)) % m for c in cols) for r in self.rows)
        return Matrix._raw(self.ring, rows)

    __mul__ = __matmul__

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product."""
        m = self.ring.modulus
        if m is None:
            return tuple(sum((a * b for a, b in zip(r, v) if a), Q_ZERO) for r in self.rows)
        return tuple(sum(a * b for a, b in zip(r, v)) % m for r in self.rows)

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            inv = self.inverse()
            if inv is None:
                raise NotInvertibleError("negative power of a singular matrix")
            return inv ** (-k)
        result = Matrix.identity(self.ring, self.dim)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def transpose(self) -> "Matrix":
        return Matrix._raw(self.ring, tuple(zip(*self.rows)))

    # -- determinant / inverse / rank -------------------------------------

    def determinant(self):
        return determinant(self)

    def inverse(self) -> Optional["Matrix"]:
        return inverse(self)

    def rank(self) -> int:
        return rank(self)

    # -- text format ------------------------------------------------------

    def to_text(self) -> str:
        fmt = self.ring.format_scalar
        lines = [f"ring {self.ring}", f"dim {self.dim}"]
        lines += [" ".join(fmt(x) for x in r) for r in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, ring: Optional[RingSpec] = None) -> "Matrix":
        return parse_matrix(text, ring)

    def pretty(self) -> str:
        fmt = self.ring.format_scalar
        cells = [[fmt(x) for x in r] for r in self.rows]
        w = max(len(c) for r in cells for c in r)
        return "\n".join("[ " + " ".join(c.rjust(w) for c in r) + " ]" for r in cells)


# ---------------------------------------------------------------------------
# kernels


def mat_arith(A: Matrix, B: Matrix, op: str) -> Matrix:
    if op == "add":
        return A + B
    if op == "sub":
        return A - B
    if op == "mul":
        return A @ B
    raise ValueError(f"unknown op {op!r}")


def _require_field(ring: RingSpec, what: str) -> None:
    if not ring.is_field:
        raise UnsupportedRingError(f"{what} needs a field; {ring} has zero divisors")


def _bareiss_det(rows: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    M = [list(r) for r in rows]
    n = len(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = M[k][k]
        for i in range(k + 1, n):
            row_i, row_k = M[i], M[k]
            a = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - a * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * M[n - 1][n - 1]


def _field_det(ring: RingSpec, rows) -> object:
    M = [list(r) for r in rows]
    n = len(M)
    det = ring.one
    m = ring.modulus
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            return ring.zero
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            det = ring.neg(det)
        pk = M[k][k]
        det = ring.mul(det, pk)
        inv = ring.inv(pk)
        row_k = M[k]
        for i in range(k + 1, n):
            row_i = M[i]
            a = row_i[k]
            if a == 0:
                continue
            f = ring.mul(a, inv)
            if m is None:
                for j in range(k + 1, n):
                    row_i[j] -= f * row_k[j]
            else:
                for j in range(k + 1, n):
                    row_i[j] = (row_i[j] - f * row_k[j]) % m
    return det


def determinant(A: Matrix):
    """Exact determinant.

    Fields use Gaussian elimination; composite ``Z/m`` lifts the entries to the
    integers and runs Bareiss elimination, reducing only at the end.
    """
    R = A.ring
    if R.kind == MODULAR and not R.is_field:
        return _bareiss_det(A.rows) % R.modulus
    return _field_det(R, A.rows)


def _gauss_jordan_inverse(ring: RingSpec, rows) -> Optional[list[list]]:
    n = len(rows)
    M = [list(r) + [ring.one if i == j else ring.zero for j in range(n)] for i, r in enumerate(rows)]
    m = ring.modulus
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            return None
        M[k], M[piv] = M[piv], M[k]
        inv = ring.inv(M[k][k])
        M[k] = [ring.mul(inv, x) for x in M[k]]
        row_k = M[k]
        for i in range(n):
            if i == k or M[i][k] == 0:
                continue
            f = M[i][k]
            if m is None:
                M[i] = [a - f * b for a, b in zip(M[i], row_k)]
            else:
                M[i] = [(a - f * b) % m for a, b in zip(M[i], row_k)]
    return [r[n:] for r in M]


def _rational_inverse(rows) -> Optional[list[list]]:
    """Inverse over Q by fraction-free Gauss-Jordan on the integer-scaled rows.

    With ``A = D^-1 B`` (``D`` the row scales) the inverse is ``B^-1 D``.  Every
    elimination step divides exactly by the previous pivot, so the numbers stay
    integers of determinant size; at the end the left half is ``p I`` with ``p``
    the last pivot and the right half is ``p B^-1``.
    """
    scaled = _integer_rows(rows)
    n = len(rows)
    M = [b + [1 if i == j else 0 for j in range(n)] for i, (_, b) in enumerate(scaled)]
    prev = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k]), None)
        if piv is None:
            return None
        M[k], M[piv] = M[piv], M[k]
        row_k, p = M[k], M[k][k]
        for i in range(n):
            if i == k:
                continue
            f = M[i][k]
            M[i] = [(p * a - f * b) // prev for a, b in zip(M[i], row_k)]
        prev = p
    return [[mpq(M[i][n + j] * scaled[j][0], prev) for j in range(n)] for i in range(n)]


def inverse(A: Matrix) -> Optional[Matrix]:
    """Two-sided inverse, or ``None`` when ``A`` is not invertible.

    Over composite ``Z/m`` the inverse is the adjugate times the inverse of the
    determinant; the adjugate comes from the integer lift.
    """
    R = A.ring
    if R.kind == MODULAR and not R.is_field:
        m = R.modulus
        d_int = _bareiss_det(A.rows)
        d_inv = R.inv(d_int % m)
        if d_inv is None:
            return None
        q = RingSpec.rational()
        inv_q = _gauss_jordan_inverse(q, [[mpq(x) for x in r] for r in A.rows])
        adj = [[int(x * d_int) for x in r] for r in inv_q]
        return Matrix._raw(R, tuple(tuple((x * d_inv) % m for x in r) for r in adj))
    rows = _rational_inverse(A.rows) if R.modulus is None else _gauss_jordan_inverse(R, A.rows)
    if rows is None:
        return None
    return Matrix._raw(R, tuple(tuple(r) for r in rows))


def rref(ring: RingSpec, rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of a (possibly rectangular) matrix over a field."""
    _require_field(ring, "row reduction")
    M = [list(r) for r in rows]
    if not M:
        return M, []
    nrows, ncols = len(M), len(M[0])
    m = ring.modulus
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = ring.inv(M[r][c])
        M[r] = [ring.mul(inv, x) for x in M[r]]
        row_r = M[r]
        for i in range(nrows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                if m is None:
                    M[i] = [a - f * b for a, b in zip(M[i], row_r)]
                else:
                    M[i] = [(a - f * b) % m for a, b in zip(M[i], row_r)]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A: Matrix) -> int:
    _require_field(A.ring, "rank")
    return len(rref(A.ring, A.rows)[1])


def kernel_basis(A: Matrix) -> list[tuple]:
    """Basis of the right null space ``{v : A v = 0}`` over a field."""
    R = A.ring
    M, pivots = rref(R, A.rows)
    n = A.dim
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [R.zero] * n
        v[f] = R.one
        for row, pc in zip(M, pivots):
            v[pc] = R.neg(row[f])
        basis.append(tuple(v))
    return basis


def column_space_basis(A: Matrix) -> list[tuple]:
    """Pivot columns of ``A`` (a basis of its image) over a field."""
    _, pivots = rref(A.ring, A.rows)
    cols = A.columns()
    return [cols[c] for c in pivots]


# ---------------------------------------------------------------------------
# polynomials attached to a matrix


def charpoly(A: Matrix) -> Polynomial:
    """Characteristic polynomial ``det(xI - A)`` by Berkowitz's division-free method."""
    R = A.ring
    M = A.rows
    n = A.dim
    p = [R.one]  # highest degree first
    for r in range(n):
        a = M[r][r]
        row = M[r][:r]
        col = [M[i][r] for i in range(r)]
        T = [R.one, R.neg(a)]
        v = col
        for _ in range(r):
            s = R.zero
            for x, y in zip(row, v):
                s = R.add(s, R.mul(x, y))
            T.append(R.neg(s))
            v = [
                _dot(R, M[i][:r], v) for i in range(r)
            ]
        q = []
        for i in range(r + 2):
            s = R.zero
            for j in range(max(0, i - len(T) + 1), min(i, r) + 1):
                s = R.add(s, R.mul(T[i - j], p[j]))
            q.append(s)
        p = q
    return Polynomial._raw(R, list(reversed(p)))


def _dot(R: RingSpec, u, v):
    s = R.zero
    for x, y in zip(u, v):
        if x != 0:
            s = R.add(s, R.mul(x, y))
    return s


def _local_minpoly(A: Matrix, w: tuple) -> Polynomial:
    """Least-degree monic ``f`` with ``f(A) w = 0``, by Krylov elimination."""
    R = A.ring
    n = A.dim
    basis: list[tuple[list, int, list]] = []  # (reduced vector, pivot, combination)
    v = list(w)
    k = 0
    while True:
        comb = [R.zero] * (k + 1)
        comb[k] = R.one
        vec = list(v)
        for bvec, piv, bcomb in basis:
            c = vec[piv]
            if c != 0:
                vec = [R.sub(x, R.mul(c, y)) for x, y in zip(vec, bvec)]
                for i, y in enumerate(bcomb):
                    comb[i] = R.sub(comb[i], R.mul(c, y))
        piv = next((i for i in range(n) if vec[i] != 0), None)
        if piv is None:
            return Polynomial._raw(R, comb)
        inv = R.inv(vec[piv])
        vec = [R.mul(inv, x) for x in vec]
        comb = [R.mul(inv, x) for x in comb]
        basis.append((vec, piv, comb))
        v = list(A.apply(v))
        k += 1


def minpoly(A: Matrix) -> Polynomial:
    """Minimal polynomial as the lcm of the local minimal polynomials of ``e_k``."""
    _require_field(A.ring, "minimal polynomial")
    R = A.ring
    n = A.dim
    p = Polynomial.constant(R, 1)
    P_of_A = Matrix.identity(R, n)
    for k in range(n):
        w = tuple(P_of_A.rows[i][k] for i in range(n))
        if all(x == 0 for x in w):
            continue
        q = _local_minpoly(A, w)
        p = p * q
        P_of_A = P_of_A @ q.evaluate_matrix(A)
    return p


def char_min_poly(A: Matrix) -> tuple[Polynomial, Polynomial]:
    _require_field(A.ring, "char_min_poly")
    return charpoly(A), minpoly(A)


# ---------------------------------------------------------------------------
# structure


def conjugate(A: Matrix, Q: Matrix, Q_inv: Optional[Matrix] = None) -> Matrix:
    """``Q A Q^{-1}``."""
    A._check(Q)
    if Q_inv is None:
        Q_inv = inverse(Q)
        if Q_inv is None:
            raise NotInvertibleError("conjugating matrix is singular")
    return Q @ A @ Q_inv


def nil_exponent(A: Matrix) -> Optional[int]:
    """Least ``k >= 1`` with ``A**k == 0``, or ``None`` if ``A`` is not nilpotent."""
    R = A.ring
    bound = A.dim * R.max_nil_exponent
    if R.is_field:
        # nilpotent over a field: zero trace and A^n = 0, found by walking the powers
        trace = R.zero
        for i in range(A.dim):
            trace = R.add(trace, A.rows[i][i])
        if trace != 0:
            return None
    elif not (A ** bound).is_zero():
        return None
    P = A
    for k in range(1, bound + 1):
        if P.is_zero():
            return k
        P = P @ A
    return None


def is_unit_matrix(A: Matrix) -> bool:
    return A.ring.is_unit(determinant(A))


def structure_tests(A: Matrix) -> dict:
    k = nil_exponent(A)
    return {
        "is_nilpotent": k is not None,
        "nilpotency_exponent": k,
        "is_idempotent": A @ A == A,
        "is_unit": is_unit_matrix(A),
    }


# ---------------------------------------------------------------------------
# text format


def parse_matrix(text: str, ring: Optional[RingSpec] = None) -> Matrix:
    """Parse the ``ring`` / ``dim`` / rows text format.

    ``ring`` overrides (and must agree with) the header when both are given.
    """
    lines = [(no, ln) for no, ln in enumerate(text.splitlines(), 1) if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) < 2:
        raise ParseError("expected 'ring <spec>' and 'dim <n>' header lines", line=len(lines) + 1)
    no, ln = lines[0]
    head, _, rest = ln.strip().partition(" ")
    if head != "ring":
        raise ParseError("expected 'ring <spec>'", line=no, column=1)
    try:
        file_ring = RingSpec.parse(rest)
    except ParseError as exc:
        raise ParseError(str(exc), line=no, column=6) from None
    if ring is not None and ring != file_ring:
        raise DomainMismatchError(f"ring mismatch: requested {ring}, file declares {file_ring}")
    no, ln = lines[1]
    parts = ln.split()
    if len(parts) != 2 or parts[0] != "dim" or not parts[1].isdigit() or int(parts[1]) < 1:
        raise ParseError("expected 'dim <n>' with n >= 1", line=no, column=1)
    n = int(parts[1])
    body = lines[2:]
    if len(body) != n:
        raise ParseError(f"expected {n} matrix rows, found {len(body)}", line=body[-1][0] if body else no)
    rows = []
    for no, ln in body:
        toks = ln.split()
        if len(toks) != n:
            raise ParseError(f"expected {n} entries, found {len(toks)}", line=no, column=1)
        row = []
        col = 0
        for t in toks:
            col = ln.index(t, col) + 1
            try:
                row.append(file_ring.parse_scalar(t))
            except ParseError as exc:
                raise ParseError(str(exc), line=no, column=col) from None
            col += len(t) - 1
        rows.append(tuple(row))
    return Matrix._raw(file_ring, tuple(rows))
