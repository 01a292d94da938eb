import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nilgood.errors import DomainMismatchError, NotInvertibleError, ParseError, UnsupportedRingError
from nilgood.matrix import (
    Matrix,
    char_min_poly,
    conjugate,
    determinant,
    inverse,
    mat_arith,
    parse_matrix,
    rank,
    rref,
    structure_tests,
)
from nilgood.poly import Polynomial
from nilgood.rings import RingSpec

from conftest import GF2, GF3, GF5, QQ, random_invertible, random_matrix

Z4 = RingSpec.zmod(4)
BORDER_P3 = [[0, 0, 1], [0, 1, -1], [1, -1, 0]]
BORDER_P3_INV = [[1, 1, 1], [1, 1, 0], [1, 0, 0]]


def test_arith_examples(rng):
    A = random_matrix(GF3, 4, rng)
    assert mat_arith(Matrix.identity(GF3, 4), A, "mul") == A
    assert (A + (-A)).is_zero()
    X = Matrix(GF2, [[0, 1], [1, 0]])
    assert (X @ X).is_identity()
    with pytest.raises(DomainMismatchError):
        X + Matrix.identity(GF3, 2)
    with pytest.raises(DomainMismatchError):
        X @ Matrix.identity(GF2, 3)


def test_determinant_examples():
    assert determinant(Matrix.identity(QQ, 5)) == 1
    assert determinant(Matrix(QQ, [[0, -1], [1, 0]])) == 1
    assert determinant(Matrix(QQ, BORDER_P3_INV)) == -1


def test_determinant_composite_modulus():
    # a pivot that is a zero divisor must not break elimination
    A = Matrix(RingSpec.zmod(6), [[2, 3], [3, 2]])
    assert determinant(A) == (4 - 9) % 6
    B = Matrix(RingSpec.zmod(12), [[4, 6, 1], [6, 4, 0], [1, 0, 3]])
    ints = [[4, 6, 1], [6, 4, 0], [1, 0, 3]]
    d = (ints[0][0] * (ints[1][1] * ints[2][2] - ints[1][2] * ints[2][1])
         - ints[0][1] * (ints[1][0] * ints[2][2] - ints[1][2] * ints[2][0])
         + ints[0][2] * (ints[1][0] * ints[2][1] - ints[1][1] * ints[2][0]))
    assert determinant(B) == d % 12


def test_inverse_examples():
    P = Matrix(QQ, BORDER_P3)
    assert inverse(P) == Matrix(QQ, BORDER_P3_INV)
    assert (P @ inverse(P)).is_identity()
    assert inverse(Matrix.shift(QQ, 2)) is None
    assert inverse(Matrix(Z4, [[3, 0], [0, 1]])) == Matrix(Z4, [[3, 0], [0, 1]])
    assert inverse(Matrix(Z4, [[2, 0], [0, 1]])) is None


def test_inverse_composite_exhaustive_2x2():
    R = RingSpec.zmod(6)
    import itertools

    for vals in itertools.product(range(6), repeat=4):
        A = Matrix(R, [vals[:2], vals[2:]])
        inv = inverse(A)
        assert (inv is not None) == R.is_unit(determinant(A))
        if inv is not None:
            assert (A @ inv).is_identity() and (inv @ A).is_identity()


def test_rank_examples():
    assert rank(Matrix.zeros(QQ, 3)) == 0
    assert rank(Matrix.identity(QQ, 4)) == 4
    assert rank(Matrix.shift(GF5, 3)) == 2
    with pytest.raises(UnsupportedRingError):
        rank(Matrix.identity(RingSpec.zmod(6), 2))


def test_char_min_poly_examples():
    x = Polynomial.x(QQ)
    c, m = char_min_poly(Matrix.shift(QQ, 2))
    assert c == x * x and m == x * x
    c, m = char_min_poly(Matrix.identity(GF3, 2))
    one = Polynomial(GF3, [-1, 1])
    assert c == one * one and m == one
    f = Polynomial(GF2, [1, 1, 0, 1])
    c, m = char_min_poly(Matrix.companion(f))
    assert c == f and m == f
    assert f.evaluate_matrix(Matrix.companion(f)).is_zero()
    with pytest.raises(UnsupportedRingError):
        char_min_poly(Matrix.identity(RingSpec.zmod(4), 2))


def test_conjugate_examples():
    A = Matrix(QQ, [[1, 2], [3, 4]])
    assert conjugate(A, Matrix.identity(QQ, 2)) == A
    C = conjugate(Matrix.shift(QQ, 3), Matrix(QQ, BORDER_P3))
    assert C == Matrix(QQ, [[1, 1, 0], [0, 0, 1], [-1, -1, -1]])
    assert (C ** 3).is_zero() and not (C ** 2).is_zero()
    with pytest.raises(NotInvertibleError):
        conjugate(A, Matrix.shift(QQ, 2))


def test_structure_examples():
    s = structure_tests(Matrix.shift(QQ, 5))
    assert s["is_nilpotent"] and s["nilpotency_exponent"] == 5
    s = structure_tests(Matrix(QQ, [[1, 0], [0, 0]]))
    assert s["is_idempotent"] and not s["is_unit"] and not s["is_nilpotent"]
    s = structure_tests(Matrix(Z4, [[2, 0], [0, 2]]))
    assert s["is_nilpotent"] and s["nilpotency_exponent"] == 2
    # over Z/8 a 2x2 nilpotent can need exponent 2 * 3
    s = structure_tests(Matrix(RingSpec.zmod(8), [[0, 2], [1, 0]]))
    assert s["is_nilpotent"] and s["nilpotency_exponent"] == 6


def test_det_multiplicative():
    rng = random.Random(7)
    for ring in (GF5, QQ):
        for _ in range(1000):
            A, B = random_matrix(ring, 5, rng), random_matrix(ring, 5, rng)
            assert determinant(A @ B) == ring.mul(determinant(A), determinant(B))


def test_inverse_iff_det_unit():
    rng = random.Random(8)
    for ring in (GF2, GF5, QQ, RingSpec.zmod(12)):
        for _ in range(300):
            A = random_matrix(ring, rng.randint(1, 5), rng)
            inv = inverse(A)
            assert (inv is not None) == ring.is_unit(determinant(A))
            if inv is not None:
                assert (inv @ A).is_identity()


def test_char_min_poly_properties():
    rng = random.Random(9)
    for ring in (GF2, GF3, QQ):
        for _ in range(200):
            A = random_matrix(ring, rng.randint(1, 6), rng)
            c, m = char_min_poly(A)
            assert c.degree == A.dim and c.is_monic and m.is_monic
            assert c.evaluate_matrix(A).is_zero() and m.evaluate_matrix(A).is_zero()
            assert m.divides(c)
            # minimality: I, A, ..., A^(deg m - 1) are linearly independent
            powers, P = [], Matrix.identity(ring, A.dim)
            for _ in range(m.degree):
                powers.append([v for row in P.rows for v in row])
                P = P @ A
            assert len(rref(ring, powers)[1]) == m.degree


def test_conjugation_preserves_structure():
    rng = random.Random(10)
    for ring in (GF3, QQ):
        for _ in range(200):
            n = rng.randint(1, 5)
            A = random_matrix(ring, n, rng)
            if rng.random() < 0.3:
                A = Matrix.shift(ring, n)
            Q = random_invertible(ring, n, rng)
            assert structure_tests(conjugate(A, Q)) == structure_tests(A)


def test_text_roundtrip():
    A = Matrix(QQ, [[Fraction(1, 2), -3], [0, Fraction(-7, 4)]])
    text = A.to_text()
    assert text == "ring rational\ndim 2\n1/2 -3\n0 -7/4\n"
    assert parse_matrix(text) == A
    assert parse_matrix(text).to_text() == text


def test_parse_errors_name_position():
    with pytest.raises(ParseError, match="line 3, column 3"):
        parse_matrix("ring gf(5)\ndim 2\n1 x\n0 1\n")
    with pytest.raises(ParseError, match="line 4"):
        parse_matrix("ring gf(5)\ndim 2\n1 1\n0\n")
    with pytest.raises(ParseError):
        parse_matrix("dim 2\n")
    with pytest.raises(DomainMismatchError, match="gf\\(3\\).*gf\\(5\\)"):
        parse_matrix("ring gf(5)\ndim 1\n1\n", GF3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.lists(st.integers(-9, 9), min_size=16, max_size=16))
def test_power_and_inverse_hypothesis(n, vals):
    A = Matrix(GF5, [vals[i * n:(i + 1) * n] for i in range(n)])
    assert A ** 0 == Matrix.identity(GF5, n)
    assert A ** 3 == A @ A @ A
    inv = inverse(A)
    if inv is not None:
        assert A ** -2 == inv @ inv


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 6), st.lists(st.tuples(st.integers(-6, 6), st.integers(1, 5)), min_size=36, max_size=36),
       st.booleans())
def test_rational_inverse_fractions(n, vals, drop_rank):
    rows = [[Fraction(a, b) for a, b in vals[i * n:(i + 1) * n]] for i in range(n)]
    if drop_rank and n > 1:
        rows[-1] = [x + 2 * y for x, y in zip(rows[0], rows[1])]
    A = Matrix(QQ, rows)
    inv = inverse(A)
    assert (inv is None) == (determinant(A) == 0)
    if inv is not None:
        assert (A @ inv).is_identity() and (inv @ A).is_identity()
