import itertools
import random
from functools import lru_cache

import pytest

from nilgood.matrix import Matrix
from nilgood.rings import RingSpec

GF2, GF3, GF5, GF7 = (RingSpec.gf(p) for p in (2, 3, 5, 7))
QQ = RingSpec.rational()


def mat(ring, rows):
    return Matrix(ring, rows)


def exhaustive(ring, n):
    p = ring.modulus
    for vals in itertools.product(range(p), repeat=n * n):
        yield Matrix(ring, [vals[i * n:(i + 1) * n] for i in range(n)])


def random_matrix(ring, n, rng):
    if ring.is_finite:
        return Matrix(ring, [[rng.randrange(ring.modulus) for _ in range(n)] for _ in range(n)])
    return Matrix(ring, [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)])


def random_invertible(ring, n, rng):
    # unit lower times unit upper triangular, then a random permutation
    L = [[1 if i == j else (rng.randint(-2, 2) if j < i else 0) for j in range(n)] for i in range(n)]
    diag = (lambda: rng.randrange(1, ring.modulus)) if ring.is_finite else (lambda: rng.choice([1, 2, -1]))
    U = [[diag() if i == j else (rng.randint(-2, 2) if j > i else 0) for j in range(n)] for i in range(n)]
    perm = list(range(n))
    rng.shuffle(perm)
    return Matrix.permutation(ring, perm) @ Matrix(ring, L) @ Matrix(ring, U)


def structured_singular(ring, n, rng):
    """Singular matrices with a nontrivial nilpotent part: a random similarity
    applied to (invertible block) + (shift blocks), or a low-rank product."""
    if rng.random() < 0.5:
        k = rng.randint(0, n - 1)
        B = random_matrix(ring, n, rng)
        C = Matrix(ring, [[rng.randint(-3, 3) if j < k else 0 for j in range(n)] for _ in range(n)])
        return B @ C
    m = rng.randint(0, n - 1)
    blocks = []
    if m:
        blocks.append(random_invertible(ring, m, rng))
    left = n - m
    while left:
        r = rng.randint(1, left)
        blocks.append(Matrix.shift(ring, r))
        left -= r
    D = Matrix.direct_sum(ring, blocks)
    Q = random_invertible(ring, n, rng)
    from nilgood.matrix import inverse

    return Q @ D @ inverse(Q)


EXHAUSTIVE_SUITES = [(GF2, 2), (GF2, 3), (GF3, 2), (GF3, 3)]
RANDOM_RINGS = (GF5, GF7, QQ)
RANDOM_COUNT = 10_002  # split evenly over the three rings


@lru_cache(maxsize=None)
def exhaustive_suite(ring, n):
    return tuple(exhaustive(ring, n))


@lru_cache(maxsize=None)
def random_suite(seed=20261016, count=RANDOM_COUNT):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        ring = RANDOM_RINGS[i % 3]
        n = rng.randint(1, 12)
        A = random_matrix(ring, n, rng) if i % 2 == 0 else structured_singular(ring, n, rng)
        out.append(A)
    return tuple(out)


# -- independent brute-force oracles on 2x2 matrices ------------------------
# plain integer arithmetic, nothing from the package


def _mul2(a, b, p):
    return (
        ((a[0] * b[0] + a[1] * b[2]) % p, (a[0] * b[1] + a[1] * b[3]) % p,
         (a[2] * b[0] + a[3] * b[2]) % p, (a[2] * b[1] + a[3] * b[3]) % p)
    )


def _all2(p):
    return list(itertools.product(range(p), repeat=4))


def oracle_sets(p):
    elems = _all2(p)
    zero = (0, 0, 0, 0)
    nil = [a for a in elems if _mul2(a, a, p) == zero]  # 2x2 nilpotent iff A^2 = 0
    units = [a for a in elems if (a[0] * a[3] - a[1] * a[2]) % p]
    idem = [a for a in elems if _mul2(a, a, p) == a]
    return elems, set(nil), set(units), set(idem)


def oracle_nilgood(p):
    """{element: True/False} by searching all (nilpotent, unit-or-zero) pairs."""
    elems, nil, units, _ = oracle_sets(p)
    ok = units | {(0, 0, 0, 0)}
    return {a: any(tuple((x - y) % p for x, y in zip(a, n)) in ok for n in nil) for a in elems}


def oracle_clean(p):
    elems, _, units, idem = oracle_sets(p)
    return {a: any(tuple((x - y) % p for x, y in zip(a, e)) in units for e in idem) for a in elems}


def flat(A):
    return tuple(v for row in A.rows for v in row)


@pytest.fixture
def rng():
    return random.Random(12345)
