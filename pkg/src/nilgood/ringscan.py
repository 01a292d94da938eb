"""Brute-force structure of small finite rings ``Z/n`` and ``M_k(Z/n)``.

Elements are numbered ``0 .. n**(k*k) - 1`` by reading the matrix entries
row-major as base-``n`` digits, so element 0 is zero and sets of elements are
boolean masks.  Arithmetic is vectorised over index arrays with numpy.

``zmod(n)`` is handled as ``M_1(Z/n)``; its elements are reported as ints,
matrix elements as tuples of row tuples.  The zero ring ``zmod(1)`` is allowed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import BudgetExceededError, ParseError
from .rings import factorize

DEFAULT_BUDGET = 10**6
CROSS_CHECK_LIMIT = 10**4


def is_prime_power(n: int) -> bool:
    return n > 1 and len(factorize(n)) == 1


class FiniteRing:
    """``M_k(Z/n)`` with index-encoded elements."""

    def __init__(self, k: int, n: int, budget: int = DEFAULT_BUDGET, matrix: Optional[bool] = None):
        if k < 1 or n < 1:
            raise ValueError("need k >= 1 and n >= 1")
        self.k, self.n = k, n
        self.K = k * k
        self.size = n ** self.K
        if self.size > budget:
            raise BudgetExceededError(f"{self.size} elements exceeds the budget of {budget}")
        self.is_matrix = k > 1 if matrix is None else matrix
        self._weights = n ** np.arange(self.K - 1, -1, -1, dtype=np.int64)
        idx = np.arange(self.size, dtype=np.int64)
        self.digits = (idx[:, None] // self._weights) % n
        self.mats = self.digits.reshape(self.size, k, k)
        self.zero = 0
        self.one = self.encode(np.eye(k, dtype=np.int64))
        self.all = idx

    # -- naming -----------------------------------------------------------

    @property
    def description(self) -> str:
        if self.is_matrix:
            return f"matrix({self.k},zmod({self.n}))"
        return f"zmod({self.n})"

    def __repr__(self) -> str:
        return f"FiniteRing({self.description})"

    @classmethod
    def parse(cls, text: str, budget: int = DEFAULT_BUDGET) -> "FiniteRing":
        """Accepts ``zmod(12)``, ``zmod:12``, ``matrix(2,zmod(4))`` and ``matrix:2:4``."""
        s = re.sub(r"\s+", "", text.lower())
        m = re.fullmatch(r"zmod[(:](\d+)\)?", s)
        if m:
            return cls(1, int(m.group(1)), budget, matrix=False)
        m = re.fullmatch(r"matrix\((\d+),zmod\((\d+)\)\)", s) or re.fullmatch(r"matrix:(\d+):(\d+)", s)
        if m:
            return cls(int(m.group(1)), int(m.group(2)), budget, matrix=True)
        raise ParseError(f"bad finite ring {text!r}; expected zmod(n) or matrix(k,zmod(n))")

    # -- encoding ---------------------------------------------------------

    def encode(self, mats) -> np.ndarray:
        mats = np.asarray(mats, dtype=np.int64) % self.n
        return mats.reshape(-1, self.K) @ self._weights if mats.ndim > 2 else int(mats.reshape(self.K) @ self._weights)

    def element(self, i: int):
        m = self.mats[i]
        if not self.is_matrix:
            return int(m[0, 0])
        return tuple(tuple(int(v) for v in row) for row in m)

    def index(self, x) -> int:
        if not self.is_matrix:
            return int(x) % self.n if self.n > 1 else 0
        return self.encode(np.array(x))

    # -- arithmetic on index arrays ----------------------------------------

    def add(self, a, b):
        return ((self.digits[a] + self.digits[b]) % self.n) @ self._weights

    def sub(self, a, b):
        return ((self.digits[a] - self.digits[b]) % self.n) @ self._weights

    def mul(self, a, b):
        prod = np.matmul(self.mats[a], self.mats[b]) % self.n
        return prod.reshape(prod.shape[:-2] + (self.K,)) @ self._weights

    def det(self, a) -> np.ndarray:
        """Determinants of the matrices at indices ``a``, reduced mod ``n``."""
        return _det(self.mats[np.atleast_1d(a)], self.n)

    @cached_property
    def unit_mask(self) -> np.ndarray:
        # over a commutative base ring a matrix is a unit iff its determinant is
        d = self.det(self.all)
        return np.gcd(d, self.n) == 1

    @cached_property
    def nil_exponents(self) -> np.ndarray:
        """Least ``e >= 1`` with ``x**e = 0``, or 0 when ``x`` is not nilpotent."""
        bound = self.k * (max(factorize(self.n).values()) if self.n > 1 else 1)
        exps = np.zeros(self.size, dtype=np.int64)
        P = self.all.copy()
        for e in range(1, bound + 1):
            exps[(P == 0) & (exps == 0)] = e
            P = self.mul(P, self.all)
        return exps

    @cached_property
    def idempotent_mask(self) -> np.ndarray:
        return self.mul(self.all, self.all) == self.all

    @cached_property
    def matrix_units(self) -> list[int]:
        """``e_ij``: these span the ring as an additive group."""
        out = []
        for i in range(self.k):
            for j in range(self.k):
                m = np.zeros((self.k, self.k), dtype=np.int64)
                m[i, j] = 1
                out.append(self.encode(m))
        return out

    @property
    def is_commutative(self) -> bool:
        return self.k == 1 or self.n == 1

    def additive_closure(self, mask: np.ndarray, gens, stop=None) -> np.ndarray:
        """Smallest additive subgroup containing ``mask`` and ``gens``.

        ``mask`` must already be a subgroup.  With ``stop`` (a mask), return as
        soon as the closure meets it.
        """
        mask = mask.copy()
        for g in gens:
            if mask[g]:
                continue
            while True:
                members = np.flatnonzero(mask)
                shifted = self.add(members, np.full(members.shape, g))
                if mask[shifted].all():
                    break
                mask[shifted] = True
                if stop is not None and (mask & stop).any():
                    return mask
        return mask


def _det(m: np.ndarray, n: int) -> np.ndarray:
    # cofactor expansion along the first row; the matrices here have k <= 4
    k = m.shape[-1]
    if k == 1:
        return m[..., 0, 0] % n
    if k == 2:
        return (m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]) % n
    total = np.zeros(m.shape[:-2], dtype=np.int64)
    for j in range(k):
        minor = np.delete(m[..., 1:, :], j, axis=-1)
        term = m[..., 0, j] * _det(minor, n)
        total = (total + term) % n if j % 2 == 0 else (total - term) % n
    return total % n


# ---------------------------------------------------------------------------
# profile


def _jacobson_quasi_regular(R: FiniteRing) -> np.ndarray:
    """``{x : 1 - yx is a unit for every y}``; candidates drop out as soon as
    one ``y`` fails."""
    cand = R.all.copy()
    unit = R.unit_mask
    for y in range(R.size):
        if not len(cand):
            break
        ok = unit[R.sub(np.full(cand.shape, R.one), R.mul(np.full(cand.shape, y), cand))]
        cand = cand[ok]
    mask = np.zeros(R.size, dtype=bool)
    mask[cand] = True
    return mask


def _coset_labels(R: FiniteRing, J: np.ndarray) -> np.ndarray:
    """Label each element by the smallest index in its coset ``x + J``."""
    labels = np.full(R.size, -1, dtype=np.int64)
    members = np.flatnonzero(J)
    for x in range(R.size):
        if labels[x] < 0:
            labels[R.add(np.full(members.shape, x), members)] = x
    return labels


def _radical_is_maximal(R: FiniteRing, J: np.ndarray) -> bool:
    """Is ``J`` a maximal two-sided ideal, i.e. is ``R/J`` simple?

    Works in the quotient: for each nonzero coset ``x + J``, the two-sided
    ideal it generates is the additive span of ``e_ij x e_kl`` and must reach
    the coset of 1.
    """
    if J.all():
        return False
    labels = _coset_labels(R, J)
    reps = np.unique(labels)
    one = labels[R.one]
    E = R.matrix_units
    for x in reps:
        if x == labels[0]:
            continue
        gens = {int(labels[R.mul(R.mul(a, x), b)]) for a in E for b in E}
        # span inside R/J: close {0 + J} under the generators, then relabel
        span = {int(labels[0])}
        frontier = list(span)
        while frontier:
            nxt = []
            for s in frontier:
                for g in gens:
                    t = int(labels[R.add(s, g)])
                    if t not in span:
                        span.add(t)
                        nxt.append(t)
            frontier = nxt
            if one in span:
                break
        if one not in span:
            return False
    return True


@dataclass(eq=False)
class FiniteRingProfile:
    """Exhaustively computed structure of a finite ring.

    Sets are stored as boolean masks over element indices; the ``units``,
    ``nilpotents`` and similar properties translate them back to elements.
    """

    ring: FiniteRing
    unit_mask: np.ndarray = field(repr=False)
    nil_exponents: np.ndarray = field(repr=False)
    idempotent_mask: np.ndarray = field(repr=False)
    central_idempotent_mask: np.ndarray = field(repr=False)
    radical_mask: np.ndarray = field(repr=False)
    radical_is_nil: bool
    radical_is_maximal: bool
    is_local: bool

    @property
    def description(self) -> str:
        return self.ring.description

    @property
    def element_count(self) -> int:
        return self.ring.size

    def _elements(self, mask) -> frozenset:
        return frozenset(self.ring.element(i) for i in np.flatnonzero(mask))

    @property
    def units(self) -> frozenset:
        return self._elements(self.unit_mask)

    @property
    def nilpotents(self) -> dict:
        return {self.ring.element(i): int(self.nil_exponents[i]) for i in np.flatnonzero(self.nil_exponents)}

    @property
    def idempotents(self) -> frozenset:
        return self._elements(self.idempotent_mask)

    @property
    def central_idempotents(self) -> frozenset:
        return self._elements(self.central_idempotent_mask)

    @property
    def jacobson_radical(self) -> frozenset:
        return self._elements(self.radical_mask)

    @property
    def nilpotent_mask(self) -> np.ndarray:
        return self.nil_exponents > 0

    def summary(self) -> dict:
        return {
            "ring": self.description,
            "elements": self.element_count,
            "units": int(self.unit_mask.sum()),
            "nilpotents": int(self.nilpotent_mask.sum()),
            "idempotents": int(self.idempotent_mask.sum()),
            "central_idempotents": int(self.central_idempotent_mask.sum()),
            "jacobson_radical": int(self.radical_mask.sum()),
            "radical_is_nil": self.radical_is_nil,
            "radical_is_maximal": self.radical_is_maximal,
            "is_local": self.is_local,
        }


def profile(ring, budget: int = DEFAULT_BUDGET) -> FiniteRingProfile:
    """Enumerate units, nilpotents, idempotents and the Jacobson radical."""
    R = ring if isinstance(ring, FiniteRing) else FiniteRing.parse(ring, budget)
    if R.size > budget:
        raise BudgetExceededError(f"{R.size} elements exceeds the budget of {budget}")
    idem = R.idempotent_mask
    central = idem.copy()
    for g in R.matrix_units:
        cand = np.flatnonzero(central)
        gs = np.full(cand.shape, g)
        central[cand] = R.mul(cand, gs) == R.mul(gs, cand)
    J = _jacobson_quasi_regular(R)
    nil = R.nil_exponents > 0
    units = R.unit_mask
    return FiniteRingProfile(
        ring=R,
        unit_mask=units,
        nil_exponents=R.nil_exponents,
        idempotent_mask=idem,
        central_idempotent_mask=central,
        radical_mask=J,
        radical_is_nil=bool(nil[J].all()),
        radical_is_maximal=_radical_is_maximal(R, J),
        # local: the non-units are exactly the radical (and the ring is nonzero)
        is_local=R.size > 1 and bool((units ^ J).all()),
    )


def jacobson_via_left_ideals(R: FiniteRing) -> np.ndarray:
    """Intersection of the maximal left ideals, found by joining principal
    left ideals ``Ra`` until no new proper left ideal appears."""
    if R.size > CROSS_CHECK_LIMIT:
        raise BudgetExceededError(f"left-ideal enumeration is limited to {CROSS_CHECK_LIMIT} elements")
    if R.size == 1:
        return np.ones(1, dtype=bool)
    zero = np.zeros(R.size, dtype=bool)
    zero[0] = True
    units = R.unit_mask
    principal = {}
    for a in range(R.size):
        gens = [int(R.mul(e, a)) for e in R.matrix_units]
        mask = R.additive_closure(zero, gens)
        if not (mask & units).any():
            principal.setdefault(mask.tobytes(), (mask, gens))
    ideals = {key: mask for key, (mask, _) in principal.items()}
    frontier = list(ideals.values())
    while frontier:
        nxt = []
        for I in frontier:
            for P, gens in principal.values():
                if (P <= I).all():
                    continue
                S = R.additive_closure(I, gens, stop=units)
                if (S & units).any():
                    continue
                key = S.tobytes()
                if key not in ideals:
                    ideals[key] = S
                    nxt.append(S)
        frontier = nxt
    maximal = [I for I in ideals.values() if not any((I <= K).all() and (I != K).any() for K in ideals.values())]
    out = np.ones(R.size, dtype=bool)
    for M in maximal:
        out &= M
    return out


# ---------------------------------------------------------------------------
# element-wise verdicts


@dataclass(frozen=True)
class RingVerdict:
    """Outcome of an element-wise search.  ``witnesses`` maps each element to
    its summands when the property holds; otherwise ``counterexample`` is the
    first element with no representation and ``failures`` holds all of them."""

    property: str
    holds: bool
    witnesses: dict = field(default_factory=dict, repr=False)
    counterexample: object = None
    failures: frozenset = frozenset()

    def __bool__(self) -> bool:
        return self.holds


def _cover(R: FiniteRing, shifts, target: np.ndarray):
    """For each element ``x``, the first ``s`` in ``shifts`` with ``x - s`` in
    ``target``, or -1."""
    found = np.full(R.size, -1, dtype=np.int64)
    for s in shifts:
        todo = np.flatnonzero(found < 0)
        if not len(todo):
            break
        hit = target[R.sub(todo, np.full(todo.shape, s))]
        found[todo[hit]] = s
    return found


def _verdict(R: FiniteRing, name: str, found: np.ndarray, split) -> RingVerdict:
    missing = np.flatnonzero(found < 0)
    if len(missing):
        bad = frozenset(R.element(int(x)) for x in missing)
        return RingVerdict(name, False, counterexample=R.element(int(missing[0])), failures=bad)
    witnesses = {R.element(x): split(x, int(found[x])) for x in range(R.size)}
    return RingVerdict(name, True, witnesses)


def _nilgood_found(R: FiniteRing, units: np.ndarray, nil: np.ndarray) -> np.ndarray:
    unit_or_zero = units.copy()
    unit_or_zero[0] = True
    return _cover(R, np.flatnonzero(nil), unit_or_zero)


def is_nilgood_ring(p: FiniteRingProfile) -> RingVerdict:
    """Every element is ``nilpotent + (unit or zero)``; witnesses are ``(n, u)``."""
    R = p.ring
    found = _nilgood_found(R, p.unit_mask, p.nilpotent_mask)
    el = R.element
    return _verdict(R, "nil-good", found, lambda x, s: (el(s), el(int(R.sub(x, s)))))


def is_clean_ring(p: FiniteRingProfile) -> RingVerdict:
    """Every element is ``idempotent + unit``; witnesses are ``(e, u)``."""
    R = p.ring
    found = _cover(R, np.flatnonzero(p.idempotent_mask), p.unit_mask)
    el = R.element
    return _verdict(R, "clean", found, lambda x, s: (el(s), el(int(R.sub(x, s)))))


def is_nilgood_clean_ring(p: FiniteRingProfile) -> RingVerdict:
    """Every element is ``nilpotent + idempotent + unit``; witnesses are ``(n, e, u)``."""
    R = p.ring
    nil = np.flatnonzero(p.nilpotent_mask)
    idem = np.flatnonzero(p.idempotent_mask)
    sums = R.add(np.repeat(nil, len(idem)), np.tile(idem, len(nil)))
    pair = {}
    for s, a, b in zip(sums.tolist(), np.repeat(nil, len(idem)).tolist(), np.tile(idem, len(nil)).tolist()):
        pair.setdefault(s, (a, b))
    found = _cover(R, list(pair), p.unit_mask)
    el = R.element

    def split(x, s):
        a, b = pair[s]
        return el(a), el(b), el(int(R.sub(x, s)))

    return _verdict(R, "nil-good clean", found, split)


# ---------------------------------------------------------------------------
# structural checks


@dataclass(frozen=True)
class CheckReport:
    ring: str
    facts: dict
    violations: tuple = ()
    notes: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def check_section4(p: FiniteRingProfile) -> CheckReport:
    """Evaluate the radical / idempotent / locality statements about nil-good
    rings on one concrete ring.  Any violation points at a bug in this module.

    * nil-good implies ``J`` is nil;
    * a local ring is nil-good iff ``J`` is nil;
    * nil-good implies no central idempotents besides 0 and 1;
    * for artinian (here: all finite, nonzero) rings, nil-good iff ``J`` is maximal.
    """
    R = p.ring
    nilgood = is_nilgood_ring(p).holds
    clean = is_clean_ring(p).holds
    nilgood_clean = is_nilgood_clean_ring(p).holds
    trivial_central = bool(np.isin(np.flatnonzero(p.central_idempotent_mask), [R.zero, R.one]).all())
    facts = {
        "nil_good": nilgood,
        "clean": clean,
        "nil_good_clean": nilgood_clean,
        "radical_is_nil": p.radical_is_nil,
        "radical_is_maximal": p.radical_is_maximal,
        "is_local": p.is_local,
        "only_trivial_central_idempotents": trivial_central,
    }
    violations = []
    notes = []
    if nilgood and not p.radical_is_nil:
        violations.append("nil-good ring with a radical that is not nil")
    if p.is_local and nilgood != p.radical_is_nil:
        violations.append("local ring where nil-good and nil radical disagree")
    if nilgood and not trivial_central:
        violations.append("nil-good ring with a nontrivial central idempotent")
    if R.size == 1:
        notes.append("zero ring: it has no maximal ideal, so the maximality criterion is skipped")
    elif nilgood != p.radical_is_maximal:
        violations.append("nil-good and maximal radical disagree")
    if R.is_commutative and clean != nilgood_clean:
        violations.append("commutative ring where clean and nil-good clean disagree")
    return CheckReport(R.description, facts, tuple(violations), tuple(notes))


def check_corollary46(n: int, m: int, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """For a prime power ``m = p^j``: ``M_n(Z/m)`` is nil-good and ``M_n(pZ/m)``
    is nil; the two must agree."""
    if not is_prime_power(m):
        raise ValueError(f"{m} is not a prime power, so Z/{m} is not local")
    p = next(iter(factorize(m)))
    R = FiniteRing(n, m, budget, matrix=True)
    in_radical = (R.digits % p == 0).all(axis=1)
    radical_nil = bool((R.nil_exponents[in_radical] > 0).all())
    nilgood = bool((_nilgood_found(R, R.unit_mask, R.nil_exponents > 0) >= 0).all())
    facts = {"matrix_radical_is_nil": radical_nil, "nil_good": nilgood}
    violations = [] if radical_nil == nilgood else ["nil-good verdict and nil matrix radical disagree"]
    if not radical_nil:
        violations.append(f"M_{n}(J(Z/{m})) should be nil for a prime power modulus")
    return CheckReport(R.description, facts, tuple(violations))


def check_lifting(p: int, j: int) -> CheckReport:
    """``Z/p^j`` modulo its nil radical is the field ``Z/p``.  Check that every
    element has a nil-good decomposition whose summands reduce mod ``p`` to a
    nil-good decomposition in ``Z/p``."""
    R = FiniteRing(1, p**j, matrix=False)
    prof = profile(R)
    verdict = is_nilgood_ring(prof)
    violations = []
    if not verdict:
        violations.append(f"Z/{p ** j} is not nil-good")
    for x, (nil, u) in verdict.witnesses.items():
        # the nilpotent part must vanish mod p and a unit must stay a unit
        if nil % p or (u != 0 and u % p == 0) or (x - nil - u) % p:
            violations.append(f"{x} = {nil} + {u} does not reduce to a decomposition mod {p}")
    return CheckReport(R.description, {"nil_good": verdict.holds, "quotient": f"zmod({p})"}, tuple(violations))


@dataclass(frozen=True)
class ClassifyRow:
    n: int
    nil_good: bool
    prime_power: bool

    @property
    def agrees(self) -> bool:
        # the zero ring is nil-good vacuously
        return self.nil_good == (self.prime_power or self.n == 1)


def classify_zmod(limit: int) -> list[ClassifyRow]:
    """Nil-good verdict for every ``Z/n`` with ``1 <= n <= limit``."""
    if not 1 <= limit <= 512:
        raise ValueError("limit must be between 1 and 512")
    rows = []
    for n in range(1, limit + 1):
        R = FiniteRing(1, n, matrix=False)
        found = _nilgood_found(R, R.unit_mask, R.nil_exponents > 0)
        rows.append(ClassifyRow(n, bool((found >= 0).all()), is_prime_power(n)))
    return rows


def classify_tsv(rows) -> str:
    lines = ["n\tnil_good\tprime_power\tagrees"]
    for r in rows:
        lines.append(f"{r.n}\t{str(r.nil_good).lower()}\t{str(r.prime_power).lower()}\t{str(r.agrees).lower()}")
    return "\n".join(lines) + "\n"
