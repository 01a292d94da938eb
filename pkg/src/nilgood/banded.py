"""Lower-triangular banded infinite matrices, handled through finite truncations.

A :class:`BandedMatrix` is an entry generator plus a bandwidth ``n``: the number
of subdiagonals below the main diagonal that may be nonzero, so ``a_ij = 0``
unless ``j <= i <= j + n``.  (Stated as "``a_ij = 0`` for ``i >= j + n'``" the
same matrix has ``n' = n + 1``.)  Indices are 1-based throughout.

Products of lower-triangular matrices only sum over ``j <= l <= i``, so the
``k x k`` truncation of a product is the product of the truncations.  Every
statement here is therefore decided exactly on a finite truncation.

Generator text format::

    ring gf(3)
    band 2
    const 0 1            # main diagonal: all ones
    pattern 1 2 1 0      # first subdiagonal: 1, 0, 1, 0, ... down the columns
    entry 5 4 2          # a_54 = 2 (overrides the lines above)

``const <offset> <scalar>`` fills subdiagonal ``offset`` with a constant.
``pattern <offset> <period> <v_1> ... <v_period>`` puts ``v_{(j-1) mod period + 1}``
at ``(j + offset, j)``.  ``entry <i> <j> <scalar>`` sets one entry; a list of
``entry`` lines is an explicit finite band dump.  Later lines win.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .certificates import NilGoodCleanCertificate, verify_certificate
from .decompose import clean_decompose
from .errors import DomainMismatchError, InternalError, ParseError, PreconditionError, UnsupportedRingError
from .matrix import Matrix, inverse
from .rings import RingSpec, Scalar


@dataclass(frozen=True)
class BandedMatrix:
    bandwidth: int
    entry_gen: Callable[[int, int], object]
    ring: RingSpec
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if self.bandwidth < 0:
            raise ValueError("bandwidth must be nonnegative")

    def entry(self, i: int, j: int):
        """Raw entry ``a_ij`` (1-based); zero off the band."""
        if i < j or i > j + self.bandwidth:
            return self.ring.zero
        v = self.entry_gen(i, j)
        if isinstance(v, Scalar):
            if v.ring != self.ring:
                raise DomainMismatchError(f"generator produced a scalar of {v.ring}, expected {self.ring}")
            return v.value
        return self.ring.normalize(v)

    def __matmul__(self, other: "BandedMatrix") -> "BandedMatrix":
        return banded_mul(self, other)

    @classmethod
    def identity(cls, ring: RingSpec) -> "BandedMatrix":
        return cls(0, lambda i, j: 1, ring, "identity")

    @classmethod
    def bidiagonal(cls, ring: RingSpec) -> "BandedMatrix":
        """Ones on the diagonal and the first subdiagonal."""
        return cls(1, lambda i, j: 1, ring, "bidiagonal ones")

    @classmethod
    def from_diagonals(cls, ring: RingSpec, diagonals: dict, entries: Optional[dict] = None) -> "BandedMatrix":
        """Build from ``{offset: tuple_of_values}`` (periodic down the columns)
        and optional explicit ``{(i, j): value}`` overrides."""
        diags = {d: tuple(ring.normalize(v) for v in vals) for d, vals in diagonals.items()}
        fixed = {ij: ring.normalize(v) for ij, v in (entries or {}).items()}
        offsets = list(diags) + [i - j for i, j in fixed]
        if any(d < 0 for d in offsets):
            raise ValueError("entries above the main diagonal are not allowed")
        n = max(offsets, default=0)

        def gen(i, j):
            if (i, j) in fixed:
                return fixed[(i, j)]
            vals = diags.get(i - j)
            return vals[(j - 1) % len(vals)] if vals else ring.zero

        return cls(n, gen, ring)


def truncate(M: BandedMatrix, k: int) -> Matrix:
    """The ``k x k`` leading principal submatrix."""
    if k < 1:
        raise ValueError("truncation size must be >= 1")
    return Matrix(M.ring, [[M.entry(i, j) for j in range(1, k + 1)] for i in range(1, k + 1)])


def banded_mul(A: BandedMatrix, B: BandedMatrix) -> BandedMatrix:
    """Product; its bandwidth is at most the sum of the two bandwidths."""
    if A.ring != B.ring:
        raise DomainMismatchError(f"cannot multiply banded matrices over {A.ring} and {B.ring}")
    R = A.ring

    def gen(i, j):
        acc = R.zero
        for l in range(max(j, i - A.bandwidth), min(i, j + B.bandwidth) + 1):
            acc = R.add(acc, R.mul(A.entry(i, l), B.entry(l, j)))
        return acc

    return BandedMatrix(A.bandwidth + B.bandwidth, gen, R, f"({A.description})({B.description})")


def lower_bandwidth(M: Matrix) -> int:
    """Largest ``i - j`` with a nonzero entry (0 for a diagonal or zero matrix)."""
    best = 0
    for i, row in enumerate(M.rows):
        for j in range(i):
            if row[j] != 0:
                best = max(best, i - j)
                break
    return best


# ---------------------------------------------------------------------------
# diagonal checks


@dataclass(frozen=True)
class DiagonalReport:
    ok: bool
    depth: int
    detail: str = ""
    all_diagonal_one: bool = False

    def __bool__(self) -> bool:
        return self.ok


def idempotent_diag_check(E: BandedMatrix, depth: int) -> DiagonalReport:
    """Check that ``E^2 = E`` to ``depth``, that each ``e_ii`` is idempotent,
    and that a unit diagonal forces ``E = I`` on the truncation."""
    R = E.ring
    T = truncate(E, depth)
    if T @ T != T:
        raise PreconditionError(f"E is not idempotent on the {depth}x{depth} truncation")
    for i in range(depth):
        if not R.is_idempotent(T.rows[i][i]):
            return DiagonalReport(False, depth, f"e_{i + 1}{i + 1} = {R.format_scalar(T.rows[i][i])} is not idempotent")
    all_one = all(T.rows[i][i] == R.one for i in range(depth))
    if all_one and not T.is_identity():
        return DiagonalReport(False, depth, "unit diagonal but a nonzero entry below it", True)
    return DiagonalReport(True, depth, "", all_one)


def unit_diag_check(U: BandedMatrix, V: BandedMatrix, depth: int) -> DiagonalReport:
    """Check that ``UV = I`` to ``depth`` and that ``u_ii v_ii = 1`` for every ``i``."""
    if U.ring != V.ring:
        raise DomainMismatchError("U and V live over different rings")
    R = U.ring
    if not (truncate(U, depth) @ truncate(V, depth)).is_identity():
        raise PreconditionError(f"UV is not the identity on the {depth}x{depth} truncation")
    for i in range(1, depth + 1):
        if R.mul(U.entry(i, i), V.entry(i, i)) != R.one:
            return DiagonalReport(False, depth, f"u_{i}{i} v_{i}{i} != 1")
    return DiagonalReport(True, depth)


def alternating_inverse(ring: RingSpec) -> BandedMatrix:
    """Generator of the inverse of the bidiagonal ones matrix, ``(-1)^(i-j)``
    below the diagonal.  It is not banded, so it is given with a bandwidth large
    enough for the depth it is used at."""

    def gen(i, j):
        return 1 if (i - j) % 2 == 0 else -1

    return BandedMatrix(1 << 30, gen, ring, "alternating inverse")


def exchange_witness(k: int, ring: Optional[RingSpec] = None) -> Matrix:
    """Inverse of the ``k x k`` truncation of the bidiagonal ones matrix.

    Every entry on or below the diagonal is ``(-1)^(i-j)``, so the lower
    bandwidth is ``k - 1``: the inverse leaves every fixed band as ``k`` grows.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    R = ring or RingSpec.rational()
    inv = inverse(truncate(BandedMatrix.bidiagonal(R), k))
    for i in range(k):
        for j in range(k):
            want = R.zero if j > i else R.normalize((-1) ** (i - j))
            if inv.rows[i][j] != want:
                raise InternalError(f"exchange_witness: entry ({i + 1}, {j + 1}) breaks the alternating pattern")
    if lower_bandwidth(inv) != k - 1:
        raise InternalError("exchange_witness: inverse does not have full lower bandwidth")
    return inv


# ---------------------------------------------------------------------------
# nil-good clean decomposition


@dataclass(frozen=True)
class BandedDecomposition:
    """``A = U + E + N`` on the ``2nt x 2nt`` truncation.

    ``D_blocks[k]`` is the diagonal ``2n x 2n`` block with rows and columns
    ``2kn < i, j <= 2(k+1)n``; ``N_corner_blocks[k]`` holds ``a_ij`` for
    ``2(k+1)n < i <= (2k+3)n`` and ``(2k+1)n < j <= 2(k+1)n``.  There are ``t``
    corners; the last one sits just outside the truncation and is not part of
    the assembled ``N``.
    """

    bandwidth: int
    blocks: int
    D_blocks: tuple
    N_corner_blocks: tuple
    certificates: tuple
    A: Matrix
    U: Matrix
    E: Matrix
    N: Matrix

    @property
    def size(self) -> int:
        return 2 * self.bandwidth * self.blocks


def d_block(A: BandedMatrix, k: int) -> Matrix:
    n = A.bandwidth
    lo = 2 * k * n
    return Matrix(A.ring, [[A.entry(i, j) for j in range(lo + 1, lo + 2 * n + 1)] for i in range(lo + 1, lo + 2 * n + 1)])


def n_corner(A: BandedMatrix, k: int) -> Matrix:
    n = A.bandwidth
    r0 = 2 * (k + 1) * n
    c0 = (2 * k + 1) * n
    return Matrix(A.ring, [[A.entry(r0 + a, c0 + b) for b in range(1, n + 1)] for a in range(1, n + 1)])


def banded_nilgood_clean(A: BandedMatrix, t: int) -> BandedDecomposition:
    """Nil-good clean decomposition of the ``2nt`` truncation of ``A``.

    Each diagonal block ``D_k`` gets a clean decomposition ``E_k + U_k``; the
    corners between consecutive blocks form ``N``, which squares to zero
    because its rows and columns fall in disjoint index ranges.
    """
    R = A.ring
    n = A.bandwidth
    if not R.is_field:
        raise UnsupportedRingError(f"banded decomposition needs a field, got {R}")
    if n < 1:
        raise PreconditionError("banded decomposition needs bandwidth >= 1")
    if t < 1:
        raise ValueError("t must be >= 1")
    size = 2 * n * t
    D = tuple(d_block(A, k) for k in range(t))
    corners = tuple(n_corner(A, k) for k in range(t))
    certs = tuple(clean_decompose(Dk) for Dk in D)
    U = Matrix.direct_sum(R, [c.U for c in certs])
    E = Matrix.direct_sum(R, [c.E for c in certs])
    U_inv = Matrix.direct_sum(R, [c.u_inverse for c in certs])
    N = [[R.zero] * size for _ in range(size)]
    for k in range(t - 1):
        r0, c0 = 2 * (k + 1) * n, (2 * k + 1) * n
        for a in range(n):
            N[r0 + a][c0:c0 + n] = corners[k].rows[a]
    N = Matrix(R, N)
    A_trunc = truncate(A, size)
    if not (N @ N).is_zero():
        raise InternalError("banded_nilgood_clean: N does not square to zero")
    cert = NilGoodCleanCertificate(N, E, U, 1 if N.is_zero() else 2, U_inv, "banded")
    check = verify_certificate(A_trunc, cert)
    if not check:
        raise InternalError(f"banded_nilgood_clean: failed clause {check.clause}: {check.detail}")
    return BandedDecomposition(n, t, D, corners, certs, A_trunc, U, E, N)


# ---------------------------------------------------------------------------
# generators


def random_banded(ring: RingSpec, n: int, rng: random.Random, max_period: int = 4) -> BandedMatrix:
    """A seeded periodic generator with every subdiagonal ``0..n`` populated."""
    if ring.is_finite:
        pick = lambda: rng.randrange(ring.modulus)
    else:
        pick = lambda: rng.randint(-3, 3)
    diags = {}
    for d in range(n + 1):
        period = rng.randint(1, max_period)
        diags[d] = tuple(pick() for _ in range(period))
    M = BandedMatrix.from_diagonals(ring, diags)
    # keep the declared bandwidth even when the lowest diagonal came out zero
    return BandedMatrix(n, M.entry_gen, ring, f"random band {n}")


def parse_banded(text: str, ring: Optional[RingSpec] = None) -> BandedMatrix:
    """Parse the generator text format described in the module docstring."""
    lines = [(no, ln.split("#", 1)[0].split()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, toks) for no, toks in lines if toks]
    if len(lines) < 2 or lines[0][1][0] != "ring":
        raise ParseError("expected 'ring <spec>' header", line=lines[0][0] if lines else 1, column=1)
    try:
        file_ring = RingSpec.parse(" ".join(lines[0][1][1:]))
    except ParseError as exc:
        raise ParseError(str(exc), line=lines[0][0], column=6) from None
    if ring is not None and ring != file_ring:
        raise DomainMismatchError(f"ring mismatch: requested {ring}, file declares {file_ring}")
    no, toks = lines[1]
    if len(toks) != 2 or toks[0] != "band" or not toks[1].isdigit():
        raise ParseError("expected 'band <n>'", line=no, column=1)
    n = int(toks[1])
    diags: dict = {}
    entries: dict = {}

    def scalar(tok, no):
        try:
            return file_ring.parse_scalar(tok)
        except ParseError as exc:
            raise ParseError(str(exc), line=no) from None

    def integer(tok, no, lo=0):
        if not tok.lstrip("-").isdigit() or int(tok) < lo:
            raise ParseError(f"expected an integer >= {lo}, got {tok!r}", line=no)
        return int(tok)

    for no, toks in lines[2:]:
        kw, args = toks[0], toks[1:]
        if kw == "const" and len(args) == 2:
            d = integer(args[0], no)
            diags[d] = (scalar(args[1], no),)
            # a later const/pattern replaces earlier explicit entries on that diagonal
            entries = {ij: v for ij, v in entries.items() if ij[0] - ij[1] != d}
        elif kw == "pattern" and len(args) >= 3:
            d, period = integer(args[0], no), integer(args[1], no, 1)
            vals = args[2:]
            if len(vals) != period:
                raise ParseError(f"pattern period {period} but {len(vals)} values", line=no)
            diags[d] = tuple(scalar(v, no) for v in vals)
            entries = {ij: v for ij, v in entries.items() if ij[0] - ij[1] != d}
        elif kw == "entry" and len(args) == 3:
            i, j = integer(args[0], no, 1), integer(args[1], no, 1)
            entries[(i, j)] = scalar(args[2], no)
        else:
            raise ParseError(f"unrecognised line {' '.join(toks)!r}", line=no, column=1)
        bad = [d for d in diags if d > n] + [i - j for i, j in entries if not 0 <= i - j <= n]
        if bad:
            raise ParseError(f"offset {bad[0]} lies outside band 0..{n}", line=no)
    M = BandedMatrix.from_diagonals(file_ring, diags, entries)
    return BandedMatrix(n, M.entry_gen, file_ring, f"band {n}")
