import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdcrt import (
    IntMat,
    IntVec,
    ShapeError,
    SingularMatrixError,
    adjugate,
    det,
    inv_rational,
    inv_unimodular,
    is_unimodular,
    smith,
    solve_integer,
)
from helpers import (
    cofactor_det,
    minors_gcd_invariant_factors,
    random_matrix,
    random_nonsingular,
    run_matrix_invariants,
)


def test_value_types_validate():
    with pytest.raises(ShapeError):
        IntMat([[1, 2], [3]])
    with pytest.raises(ShapeError):
        IntVec([])
    with pytest.raises(TypeError):
        IntMat([[1.5]])


def test_det_examples():
    assert det(IntMat.identity(2)) == 1
    assert det(IntMat([[48, 17], [8, 46]])) == 2072
    # |det| of the combined modulus equals the product of factor |det|s
    m = IntMat([[4, 3], [3, 4]])
    g1 = IntMat([[4, -1], [-1, 4]])
    g2 = IntMat([[7, 4], [4, 7]])
    g3 = IntMat([[-2, 6], [6, -2]])
    r = IntMat([[402, 522], [522, 402]])
    assert m @ g1 @ g2 @ g3 == r
    assert abs(det(r)) == abs(det(m) * det(g1) * det(g2) * det(g3))
    assert det(r) == cofactor_det(r.entries)


def test_det_matches_cofactor_oracle():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n)
        assert det(a) == cofactor_det(a.entries)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 3).flatmap(
        lambda n: st.tuples(
            st.lists(
                st.lists(st.integers(-30, 30), min_size=n, max_size=n),
                min_size=n,
                max_size=n,
            ),
            st.lists(
                st.lists(st.integers(-30, 30), min_size=n, max_size=n),
                min_size=n,
                max_size=n,
            ),
        )
    )
)
def test_det_multiplicative(pair):
    a, b = IntMat(pair[0]), IntMat(pair[1])
    assert det(a @ b) == det(a) * det(b)


def test_adjugate_examples():
    assert adjugate(IntMat.identity(3)) == IntMat.identity(3)
    assert adjugate(IntMat([[2, 3], [4, 5]])) == IntMat([[5, -3], [-4, 2]])
    rank1 = IntMat([[2, 4], [1, 2]])
    assert rank1 @ adjugate(rank1) == IntMat([[0, 0], [0, 0]])


def test_adjugate_identity_random():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 4)
        a = random_matrix(rng, n)
        d = det(a)
        assert a @ adjugate(a) == d * IntMat.identity(n)


def test_is_unimodular():
    assert is_unimodular(IntMat([[2, 1], [1, 1]]))
    assert not is_unimodular(IntMat([[2, 0], [0, 2]]))
    assert is_unimodular(IntMat.identity(4))


def test_smith_already_diagonal():
    sf = smith(IntMat.diag([1, 2]))
    assert sf.lam == IntMat.diag([1, 2])
    assert sf.invariant_factors == (1, 2)


def test_smith_small_example():
    a = IntMat([[2, 3], [4, 5]])
    sf = smith(a)
    assert sf.lam == IntMat.diag([1, 2])
    assert minors_gcd_invariant_factors(a) == (1, 2)


def test_smith_rectangular_block_shape():
    # 2 x 4 concatenation reduces to (diag | 0)
    a = IntMat.hstack(IntMat([[2, 3], [4, 5]]), IntMat([[7, 0], [1, 3]]))
    sf = smith(a)
    assert sf.u @ a @ sf.v == sf.lam
    for i in range(2):
        for j in range(4):
            if i != j:
                assert sf.lam[i, j] == 0
    assert all(x > 0 for x in sf.invariant_factors)


def test_smith_zero_matrix():
    sf = smith(IntMat([[0, 0], [0, 0]]))
    assert sf.lam == IntMat([[0, 0], [0, 0]])
    assert is_unimodular(sf.u) and is_unimodular(sf.v)


def test_matrix_invariants_random():
    run_matrix_invariants(150, seed=23)


def test_smith_large_entries():
    rng = random.Random(29)
    for _ in range(40):
        a = IntMat(
            [[rng.randint(-1000, 1000) for _ in range(3)] for _ in range(3)]
        )
        sf = smith(a)
        assert is_unimodular(sf.u) and is_unimodular(sf.v)
        assert sf.u @ a @ sf.v == sf.lam
        assert sf.invariant_factors == minors_gcd_invariant_factors(a)


def test_smith_rectangular_random():
    rng = random.Random(31)
    for _ in range(60):
        nr, nc = rng.randint(1, 4), rng.randint(1, 4)
        a = IntMat(
            [[rng.randint(-15, 15) for _ in range(nc)] for _ in range(nr)]
        )
        sf = smith(a)
        assert is_unimodular(sf.u) and is_unimodular(sf.v)
        assert sf.u @ a @ sf.v == sf.lam
        facs = sf.invariant_factors
        for x, y in zip(facs, facs[1:]):
            assert y % x == 0
        assert facs == minors_gcd_invariant_factors(a)
        for i in range(nr):
            for j in range(nc):
                if i != j:
                    assert sf.lam[i, j] == 0


def test_inv_rational():
    ident = inv_rational(IntMat.identity(2))
    assert ident == ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    diag = inv_rational(IntMat.diag([2, 4]))
    assert diag[0][0] == Fraction(1, 2) and diag[1][1] == Fraction(1, 4)
    a = IntMat([[2, 3], [4, 5]])
    inv = inv_rational(a)
    for i in range(2):
        for j in range(2):
            acc = sum(Fraction(a[i, k]) * inv[k][j] for k in range(2))
            assert acc == (1 if i == j else 0)
    with pytest.raises(SingularMatrixError):
        inv_rational(IntMat([[1, 2], [2, 4]]))


def test_inv_unimodular_and_solve():
    u = IntMat([[2, 1], [1, 1]])
    assert u @ inv_unimodular(u) == IntMat.identity(2)
    rng = random.Random(3)
    for _ in range(50):
        a = random_nonsingular(rng, 3, -9, 9)
        x = IntVec([rng.randint(-5, 5) for _ in range(3)])
        assert solve_integer(a, a @ x) == x
