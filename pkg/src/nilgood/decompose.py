"""Constructive nil-good, clean and nil-good clean decompositions of square
matrices over a field.

Two nil-good engines are provided:

* :func:`nilgood_decompose` works in rational canonical form.  Companion blocks
  with zero constant term get a ``-1`` written into their constant-term slot
  (the nilpotent part picks up the matching ``+1``), invertible blocks pass
  through, and a trailing block of ``x`` factors (a zero block) is absorbed by
  bordering it with the block in front of it.
* :func:`fitting_strategy` splits ``A`` into an invertible part and a nilpotent
  part first and borders the zero blocks of the nilpotent part against the
  invertible part.

Every construction is verified by exact arithmetic before it is returned.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .canonical import (
    CompanionBlock,
    FrobeniusForm,
    fitting_decompose,
    frobenius_form,
    nilpotent_shift_form,
    permute_blocks,
    reorder_blocks,
)
from .certificates import (
    CleanCertificate,
    NilGoodCertificate,
    NilGoodCleanCertificate,
    verify_certificate,
)
from .errors import InternalError, PreconditionError, UnsupportedRingError
from .matrix import Matrix, determinant, inverse, nil_exponent
from .rings import RingSpec

STRATEGIES = ("canonical", "fitting", "clean")


def _require_field(ring: RingSpec) -> None:
    if not ring.is_field:
        raise UnsupportedRingError(f"decompositions need a field; {ring} has zero divisors")


# ---------------------------------------------------------------------------
# fixed building blocks


def border_P(ring: RingSpec, s: int) -> Matrix:
    """The ``s x s`` change of basis used to bend the shift ``N_s`` into a
    nilpotent with a full last row.

    Row 0 is ``e_{s-1}``, rows ``1..s-2`` are ``e_i - e_{i+1}`` and the last
    row is ``e_0 - e_1``.
    """
    if s < 2:
        raise ValueError("border_P needs s >= 2")
    rows = [[0] * s for _ in range(s)]
    rows[0][s - 1] = 1
    for i in range(1, s - 1):
        rows[i][i] = 1
        rows[i][i + 1] = -1
    rows[s - 1][0] = 1
    rows[s - 1][1] -= 1
    return Matrix(ring, rows)


def border_P_inv(ring: RingSpec, s: int) -> Matrix:
    """Closed form of ``border_P(s)^{-1}``: ones in column 0, in row 0, and on
    the upper staircase ``i <= j <= s-2``."""
    rows = [[0] * s for _ in range(s)]
    for j in range(s):
        rows[0][j] = 1
    for i in range(1, s):
        rows[i][0] = 1
        for j in range(i, s - 1):
            rows[i][j] = 1
    return Matrix(ring, rows)


def bent_shift(ring: RingSpec, s: int) -> Matrix:
    """``P N_s P^{-1}`` for ``P = border_P(s)``."""
    return border_P(ring, s) @ Matrix.shift(ring, s) @ border_P_inv(ring, s)


def _split_ok(U: Matrix, N: Matrix) -> bool:
    return U.ring.is_unit(determinant(U)) and nil_exponent(N) is not None


def _lists(ring: RingSpec, n: int) -> list[list]:
    return [[ring.zero] * n for _ in range(n)]


def _place(target: list[list], block: Matrix, off: int) -> None:
    for i, r in enumerate(block.rows):
        target[off + i][off:off + block.dim] = r


# ---------------------------------------------------------------------------
# block surgery


def surgery_companion(block: CompanionBlock) -> tuple[Matrix, Matrix]:
    """Split a companion block with zero constant term into unit + square-zero.

    The unit part is the block with ``-1`` written at ``(0, m-1)``; the
    nilpotent part is the matrix unit at ``(0, m-1)``.
    """
    m = block.size
    if m < 2 or block.constant_term != 0:
        raise PreconditionError("surgery_companion needs a block of size >= 2 with zero constant term")
    R = block.poly.ring
    C = block.matrix()
    U = C.with_entries({(0, m - 1): R.neg(R.one)})
    N = Matrix.unit(R, m, 0, m - 1)
    if not R.is_unit(determinant(U)):
        raise InternalError("surgery_companion produced a singular unit block")
    return U, N


def bordered_split(U_A: Matrix, k: int) -> tuple[Matrix, Matrix]:
    """Split ``U_A ⊕ 0_k`` (``U_A`` invertible) into unit + nilpotent.

    The last row and column of ``U_A`` together with the zero block form a
    ``(k+1)``-corner; the nilpotent summand is ``-P N_{k+1} P^{-1}`` placed on
    that corner and the unit summand is what remains.  The unit summand has
    determinant ``±det(U_A)``.
    """
    R = U_A.ring
    m = U_A.dim
    n = m + k
    F = _lists(R, n)
    _place(F, U_A, 0)
    bent = bent_shift(R, k + 1)
    N = _lists(R, n)
    for i in range(k + 1):
        for j in range(k + 1):
            N[m - 1 + i][m - 1 + j] = R.neg(bent.rows[i][j])
    N_mat = Matrix(R, N)
    return Matrix(R, F) - N_mat, N_mat


def border_augmented_split(block: CompanionBlock, z: int) -> tuple[Matrix, Matrix]:
    """Unit + nilpotent candidate for ``C ⊕ 0_z`` built on a two-row corner.

    The last two rows and columns of the companion block ``C`` (size ``r >= 2``)
    are joined to the zero block to form a ``(z+2)``-corner carrying
    ``-P N_{z+2} P^{-1}``; for ``r >= 3`` the nilpotent summand also gets ``-1``
    at ``(0, r-3)``.  The result is *not* guaranteed to be a valid split: it is
    singular when ``z = 1`` and the companion's ``x^{r-1}`` coefficient is
    ``-1``, and for ``r = 3`` the extra entry lands on the diagonal.  Callers
    must check it.
    """
    r = block.size
    if r < 2:
        raise PreconditionError("border_augmented_split needs a block of size >= 2")
    R = block.poly.ring
    n = r + z
    F = _lists(R, n)
    _place(F, block.matrix(), 0)
    s = z + 2
    bent = bent_shift(R, s)
    N = _lists(R, n)
    for i in range(s):
        for j in range(s):
            N[r - 2 + i][r - 2 + j] = R.neg(bent.rows[i][j])
    if r >= 3:
        N[0][r - 3] = R.sub(N[0][r - 3], R.one)
    N_mat = Matrix(R, N)
    return Matrix(R, F) - N_mat, N_mat


class ZeroBlockSplit(NamedTuple):
    unit: Matrix
    nil: Matrix
    route: str


def _split_block_with_zero(block: CompanionBlock, z: int) -> ZeroBlockSplit:
    """Split ``C ⊕ 0_z`` for the block ``C`` just before the zero block."""
    R = block.poly.ring
    if block.size == 1:
        # a 1x1 invertible block: the bordered route with a_mm = the entry
        U, N = bordered_split(block.matrix(), z)
        return ZeroBlockSplit(U, N, "zero-block:1x1-bordered")
    U, N = border_augmented_split(block, z)
    if _split_ok(U, N):
        return ZeroBlockSplit(U, N, "zero-block:augmented")
    if block.is_invertible:
        U, N = bordered_split(block.matrix(), z)
        return ZeroBlockSplit(U, N, "zero-block:bordered")
    Cs, Ns = surgery_companion(block)
    U, N = bordered_split(Cs, z)
    N = N + Matrix.direct_sum(R, [Ns, Matrix.zeros(R, z)])
    return ZeroBlockSplit(U, N, "zero-block:surgery+bordered")


def surgery_zero_block(form: FrobeniusForm) -> ZeroBlockSplit:
    """Unit + nilpotent split of a reordered canonical form whose trailing
    blocks are ``x`` (a zero block of size ``z >= 1``).

    The block in front of the zero block is merged with it (see
    :func:`border_augmented_split`, falling back to :func:`bordered_split`);
    every other zero-constant block gets :func:`surgery_companion`, and
    invertible blocks pass through unchanged.
    """
    R = form.ring
    blocks = form.blocks
    z = 0
    while z < len(blocks) and blocks[-1 - z].size == 1 and blocks[-1 - z].constant_term == 0:
        z += 1
    lead = blocks[: len(blocks) - z]
    if z == 0 or not lead:
        raise PreconditionError("surgery_zero_block needs a trailing zero block and a block before it")
    n = form.source_dim
    U = _lists(R, n)
    N = _lists(R, n)
    off = 0
    for b in lead[:-1]:
        if b.is_invertible:
            _place(U, b.matrix(), off)
        else:
            Ub, Nb = surgery_companion(b)
            _place(U, Ub, off)
            _place(N, Nb, off)
        off += b.size
    tail = _split_block_with_zero(lead[-1], z)
    _place(U, tail.unit, off)
    _place(N, tail.nil, off)
    U_mat, N_mat = Matrix(R, U), Matrix(R, N)
    if not _split_ok(U_mat, N_mat):
        raise InternalError("surgery_zero_block: assembled split failed verification")
    return ZeroBlockSplit(U_mat, N_mat, tail.route)


def _surgery_all(form: FrobeniusForm) -> tuple[Matrix, Matrix]:
    R = form.ring
    n = form.source_dim
    U = _lists(R, n)
    N = _lists(R, n)
    for b, off in zip(form.blocks, form.offsets()):
        if b.is_invertible:
            _place(U, b.matrix(), off)
        else:
            Ub, Nb = surgery_companion(b)
            _place(U, Ub, off)
            _place(N, Nb, off)
    return Matrix(R, U), Matrix(R, N)


# ---------------------------------------------------------------------------
# certificates


def _nilgood_certificate(A: Matrix, N: Matrix, U: Matrix, strategy: str, route) -> NilGoodCertificate:
    k = nil_exponent(N)
    if k is None:
        raise InternalError(f"{strategy}: nilpotent summand is not nilpotent")
    if U.is_zero():
        u_inv = None
    else:
        u_inv = inverse(U)
        if u_inv is None:
            raise InternalError(f"{strategy}: unit summand is singular")
    cert = NilGoodCertificate(N, U, k, u_inv, strategy, tuple(route))
    check = verify_certificate(A, cert)
    if not check:
        raise InternalError(f"{strategy}: certificate failed clause {check.clause}: {check.detail}")
    return cert


def _trivial(A: Matrix, strategy: str, nilpotent_shortcut: bool = True) -> Optional[NilGoodCertificate]:
    R = A.ring
    Z = Matrix.zeros(R, A.dim)
    if A.is_zero():
        return _nilgood_certificate(A, Z, Z, strategy, ["trivial:zero"])
    # an invertible matrix is never nilpotent, so testing it first is cheaper
    # and does not change the precedence zero, nilpotent, invertible
    if R.is_unit(determinant(A)):
        return _nilgood_certificate(A, Z, A, strategy, ["trivial:invertible"])
    if nilpotent_shortcut and nil_exponent(A) is not None:
        return _nilgood_certificate(A, A, Z, strategy, ["trivial:nilpotent"])
    return None


def _back(Q: Matrix, Q_inv: Matrix, X: Matrix) -> Matrix:
    return Q @ X @ Q_inv


def nilgood_decompose(A: Matrix, nilpotent_shortcut: bool = True) -> NilGoodCertificate:
    """Nil-good decomposition through the rational canonical form.

    Trivial cases are tried in the order zero, nilpotent, invertible.  With
    ``nilpotent_shortcut=False`` a nonzero nilpotent matrix is sent through
    the block surgery instead of being returned as ``(A, 0)``, which yields a
    genuinely invertible unit summand.
    """
    _require_field(A.ring)
    cert = _trivial(A, "canonical", nilpotent_shortcut)
    if cert is not None:
        return cert
    form = reorder_blocks(frobenius_form(A))
    if form.blocks[-1].size == 1 and form.blocks[-1].constant_term == 0:
        split = surgery_zero_block(form)
        U_F, N_F, route = split.unit, split.nil, [split.route]
    else:
        U_F, N_F = _surgery_all(form)
        route = ["surgery"]
    Q, Q_inv = form.transform, form.transform_inv
    return _nilgood_certificate(A, _back(Q, Q_inv, N_F), _back(Q, Q_inv, U_F), "canonical", route)


# ---------------------------------------------------------------------------
# Fitting route


def _swap(ring: RingSpec, n: int, i: int, j: int) -> Matrix:
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    return Matrix.permutation(ring, perm)


def augment_unit_zero_block(U_A: Matrix, k: int) -> tuple[Matrix, Matrix, str]:
    """Split ``U_A ⊕ 0_k`` after moving a nonzero entry into ``U_A``'s last
    diagonal slot.

    Branches, tried in order: the last diagonal entry is already nonzero;
    swap in another nonzero diagonal entry; shear (subtract row ``m-2`` from
    row ``m-1``) when the entry just above the last diagonal one is nonzero;
    otherwise swap a nonzero entry of the last column into row ``m-2`` and
    then shear.  Returns ``(U, N, branch)``.
    """
    R = U_A.ring
    m = U_A.dim
    a = U_A.rows
    I_m = Matrix.identity(R, m)
    if a[m - 1][m - 1] != 0:
        branch, T = "a_mm", I_m
    else:
        i = next((i for i in range(m) if a[i][i] != 0), None)
        shear = None
        if m >= 2:
            shear = I_m.with_entries({(m - 1, m - 2): R.neg(R.one)})
        if i is not None:
            branch, T = "permutation", _swap(R, m, i, m - 1)
        elif m >= 2 and a[m - 2][m - 1] != 0:
            branch, T = "shear", shear
        else:
            kk = next((r for r in range(m - 2) if a[r][m - 1] != 0), None)
            if kk is None:
                raise InternalError("augment_unit_zero_block: unit part has a zero last column")
            branch, T = "column-swap+shear", shear @ _swap(R, m, kk, m - 2)
    T_inv = inverse(T)
    moved = T @ U_A @ T_inv
    if moved.rows[m - 1][m - 1] == 0:
        raise InternalError(f"augment_unit_zero_block: branch {branch} left a zero corner")
    U, N = bordered_split(moved, k)
    T_full = Matrix.direct_sum(R, [T, Matrix.identity(R, k)])
    T_full_inv = Matrix.direct_sum(R, [T_inv, Matrix.identity(R, k)])
    return T_full_inv @ U @ T_full, T_full_inv @ N @ T_full, branch


def fitting_strategy(A: Matrix) -> NilGoodCertificate:
    """Nil-good decomposition through the Fitting split ``A ~ U_A ⊕ N_A``."""
    R = A.ring
    _require_field(R)
    cert = _trivial(A, "fitting")
    if cert is not None:
        return cert
    fd = fitting_decompose(A)
    U_A, N_A = fd.unit_part, fd.nil_part
    m = U_A.dim
    shift = nilpotent_shift_form(N_A)
    order = sorted(range(len(shift.blocks)), key=lambda i: shift.blocks[i].size != 1)
    shift = permute_blocks(shift, order)
    k = sum(1 for b in shift.blocks if b.size == 1)
    n = A.dim
    U = _lists(R, n)
    N = _lists(R, n)
    route = []
    if k:
        Ub, Nb, branch = augment_unit_zero_block(U_A, k)
        _place(U, Ub, 0)
        _place(N, Nb, 0)
        route.append(f"fitting:{branch}")
    else:
        _place(U, U_A, 0)
        route.append("fitting:surgery")
    off = m + k
    for b in shift.blocks[k:]:
        Ub, Nb = surgery_companion(b)
        _place(U, Ub, off)
        _place(N, Nb, off)
        off += b.size
    Q = fd.transform @ Matrix.direct_sum(R, [Matrix.identity(R, m), shift.transform])
    Q_inv = Matrix.direct_sum(R, [Matrix.identity(R, m), shift.transform_inv]) @ fd.transform_inv
    U_d, N_d = Matrix(R, U), Matrix(R, N)
    return _nilgood_certificate(A, _back(Q, Q_inv, N_d), _back(Q, Q_inv, U_d), "fitting", route)


# ---------------------------------------------------------------------------
# clean


def clean_shift_block(ring: RingSpec, r: int) -> tuple[Matrix, Matrix]:
    """Idempotent + unit split of the shift ``N_r``.

    ``r = 1``: ``0 = 1 + (-1)``.  ``r >= 2``: the idempotent has ones at
    ``(r-1, r-1)`` and ``(0, r-1)``; the unit ``N_r - E`` is the companion
    matrix of ``x^r + x^{r-1} + 1``, so its determinant is ``±1``.
    """
    if r == 1:
        return Matrix(ring, [[1]]), Matrix(ring, [[-1]])
    E = Matrix.unit(ring, r, r - 1, r - 1) + Matrix.unit(ring, r, 0, r - 1)
    return E, Matrix.shift(ring, r) - E


def clean_decompose(A: Matrix) -> CleanCertificate:
    """Clean decomposition ``A = E + U``: the invertible Fitting part keeps
    ``E = 0``; each shift block of the nilpotent part uses :func:`clean_shift_block`."""
    R = A.ring
    _require_field(R)
    n = A.dim
    fd = fitting_decompose(A)
    E = _lists(R, n)
    U = _lists(R, n)
    m = fd.unit_dim
    if m:
        _place(U, fd.unit_part, 0)
    Q, Q_inv = fd.transform, fd.transform_inv
    if fd.nil_part is not None:
        shift = nilpotent_shift_form(fd.nil_part)
        off = m
        for b in shift.blocks:
            Eb, Ub = clean_shift_block(R, b.size)
            _place(E, Eb, off)
            _place(U, Ub, off)
            off += b.size
        if m:
            Q = Q @ Matrix.direct_sum(R, [Matrix.identity(R, m), shift.transform])
            Q_inv = Matrix.direct_sum(R, [Matrix.identity(R, m), shift.transform_inv]) @ Q_inv
        else:
            Q = Q @ shift.transform
            Q_inv = shift.transform_inv @ Q_inv
    E_m = _back(Q, Q_inv, Matrix(R, E))
    U_m = _back(Q, Q_inv, Matrix(R, U))
    u_inv = inverse(U_m)
    if u_inv is None:
        raise InternalError("clean_decompose: unit summand is singular")
    cert = CleanCertificate(E_m, U_m, u_inv, "clean", ("clean:fitting",))
    check = verify_certificate(A, cert)
    if not check:
        raise InternalError(f"clean_decompose: certificate failed clause {check.clause}: {check.detail}")
    return cert


# ---------------------------------------------------------------------------
# nil-good clean


def nilgood_clean_decompose(A: Matrix, strategy: str = "canonical") -> NilGoodCleanCertificate:
    """``A = N + E + U`` with ``N`` nilpotent, ``E`` idempotent, ``U`` a unit.

    ``strategy`` is ``"canonical"`` or ``"fitting"`` for ``(N, 0, U)`` from the
    matching nil-good engine, or ``"clean"`` for ``(0, E, U)``.  A nil-good
    certificate whose unit summand is zero is redone without the nilpotent
    shortcut; the zero matrix itself becomes ``(0, I, -I)``.
    """
    R = A.ring
    _require_field(R)
    n = A.dim
    Z = Matrix.zeros(R, n)
    if strategy == "clean":
        c = clean_decompose(A)
        cert = NilGoodCleanCertificate(Z, c.E, c.U, 1, c.u_inverse, "clean", c.route)
    elif strategy in ("canonical", "fitting"):
        ng = nilgood_decompose(A) if strategy == "canonical" else fitting_strategy(A)
        if ng.u_inverse is None and not A.is_zero():
            ng = nilgood_decompose(A, nilpotent_shortcut=False)
        if ng.u_inverse is None:
            I = Matrix.identity(R, n)
            cert = NilGoodCleanCertificate(Z, I, -I, 1, -I, strategy, ("nil-good-clean:zero",))
        else:
            cert = NilGoodCleanCertificate(ng.N, Z, ng.U, ng.nil_exponent, ng.u_inverse, strategy, ng.route)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    check = verify_certificate(A, cert)
    if not check:
        raise InternalError(f"nilgood_clean_decompose: certificate failed clause {check.clause}: {check.detail}")
    return cert


def decompose(A: Matrix, strategy: str = "canonical"):
    """Dispatch on the CLI strategy names."""
    if strategy == "canonical":
        return nilgood_decompose(A)
    if strategy == "fitting":
        return fitting_strategy(A)
    if strategy == "clean":
        return clean_decompose(A)
    if strategy == "nil-good-clean":
        return nilgood_clean_decompose(A)
    raise ValueError(f"unknown strategy {strategy!r}")
