import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from isotropy.commutant import (
    BlockToeplitzMatrix,
    CommutantShape,
    StructureError,
    commutant_basis,
    commutant_coincidence_check,
    commutation_nullity,
    exp_nilpotent_jordan,
    pack_toeplitz,
    unpack_toeplitz,
)
from isotropy.engine import random_matrix, random_nonsingular
from isotropy.exact import ExactMatrix, SingularMatrixError, gq
from strategies import alphas

SHAPES = [((1,), (2,)), ((2,), (1,)), ((3,), (1,)), ((2, 1), (1, 1)), ((3, 2), (1, 1)), ((3, 1), (1, 2)),
          ((4, 2, 1), (1, 1, 1)), ((2, 1), (2, 2))]


def random_toeplitz(shape, rng, invertible=True):
    coeffs = {}
    for r in range(shape.N):
        for s in range(shape.N):
            blocks = [random_matrix(rng, shape.mu[r], shape.mu[s]) for _ in range(shape.b(r, s))]
            if r == s and invertible:
                blocks[0] = random_nonsingular(rng, shape.mu[r])
            coeffs[(r, s)] = tuple(blocks)
    return BlockToeplitzMatrix(shape, coeffs)


def test_shape_counts():
    sh = CommutantShape((3, 1), (1, 2))
    assert sh.b(0, 1) == sh.b(1, 0) == 1
    assert sh.pad(1, 0) == 2 and sh.pad(0, 1) == 0
    assert sh.dimension() == 3 + 2 + 2 + 4


def test_commutant_examples():
    assert commutant_basis(CommutantShape((1,), (3,))).dimension == 9
    fam = commutant_basis(CommutantShape((2,), (1,)))
    assert fam.dimension == 2
    assert fam.expand([gq(5), gq(7)]) == ExactMatrix([[5, 7], [0, 5]])
    assert commutant_basis(CommutantShape((2, 1), (1, 1))).dimension == 5


@pytest.mark.parametrize("alpha,mu", SHAPES)
@pytest.mark.parametrize("lam", [gq(0), gq(1), gq(0, 1)])
def test_commutant_dimension_matches_brute_force(alpha, mu, lam):
    sh = CommutantShape(alpha, mu)
    fam = commutant_basis(sh, lam)
    J = sh.jordan(lam)
    assert fam.dimension == sh.dimension() == commutation_nullity(J)
    for X in fam.basis():
        assert J @ X == X @ J


def test_exp_nilpotent_jordan():
    assert exp_nilpotent_jordan(1) == ExactMatrix([[1]])
    assert exp_nilpotent_jordan(2) == ExactMatrix([[1, 1], [0, 1]])
    assert exp_nilpotent_jordan(3) == ExactMatrix([[1, 1, gq("1/2")], [0, 1, 1], [0, 0, 1]])


@pytest.mark.parametrize("alpha,mu", [((1,), (2,)), ((3,), (1,)), ((2, 1), (1, 1)), ((3, 1), (1, 2))])
def test_coincidence(alpha, mu):
    assert commutant_coincidence_check(CommutantShape(alpha, mu))


@pytest.mark.parametrize("alpha,mu", SHAPES)
def test_pack_unpack_round_trip(alpha, mu):
    sh = CommutantShape(alpha, mu)
    rng = random.Random(0)
    X = commutant_basis(sh).expand([gq(rng.randint(-3, 3)) for _ in range(sh.dimension())])
    Y = pack_toeplitz(X, sh)
    assert unpack_toeplitz(Y) == X
    assert pack_toeplitz(ExactMatrix.identity(sh.n), sh) == BlockToeplitzMatrix.identity(sh)


def test_pack_rejects_non_commutant():
    sh = CommutantShape((2,), (1,))
    with pytest.raises(StructureError):
        pack_toeplitz(ExactMatrix([[1, 0], [1, 1]]), sh)


@pytest.mark.parametrize("alpha,mu", SHAPES)
def test_group_operations(alpha, mu):
    sh = CommutantShape(alpha, mu)
    rng = random.Random(1)
    for _ in range(5):
        X, Y = random_toeplitz(sh, rng), random_toeplitz(sh, rng)
        P = X @ Y
        assert P.dense == X.dense @ Y.dense
        assert X @ X.inverse() == BlockToeplitzMatrix.identity(sh)
        D, V = X.diagonal_part(), X.unipotent_part()
        assert D @ V == X
        assert all(V.coefficient(r, r, 0) == ExactMatrix.identity(sh.mu[r]) for r in range(sh.N))


def test_inverse_needs_nonsingular_diagonal():
    sh = CommutantShape((2,), (1,))
    X = BlockToeplitzMatrix(sh, {(0, 0): (ExactMatrix([[0]]), ExactMatrix([[1]]))})
    with pytest.raises(SingularMatrixError):
        X.inverse()


@given(alphas(max_alpha=3), st.integers(0, 10 ** 6))
def test_json_round_trip(alpha, seed):
    rng = random.Random(seed)
    sh = CommutantShape(alpha, tuple(rng.randint(1, 2) for _ in alpha))
    X = random_toeplitz(sh, rng)
    assert BlockToeplitzMatrix.from_json(X.to_json()) == X
    assert set(X.to_json()["coeffs"]) == {f"{r + 1},{s + 1}" for r in range(sh.N) for s in range(sh.N)}
