import pytest
from hypothesis import given
from hypothesis import strategies as st

from isotropy.exact import ExactMatrix, gq
from isotropy.structured import (
    block_shuffle_pairs,
    direct_sum,
    exchange,
    gamma,
    shuffle,
    sign_diag,
    toeplitz_alternating,
    toeplitz_upper,
)
from strategies import parity_matrices


def scalars(*values):
    return [ExactMatrix([[v]]) for v in values]


def test_toeplitz_upper_examples():
    assert toeplitz_upper(scalars(7)) == ExactMatrix([[7]])
    assert toeplitz_upper(scalars(1, 2, 3)) == ExactMatrix([[1, 2, 3], [0, 1, 2], [0, 0, 1]])


def test_toeplitz_upper_blocks():
    A, B, C = (ExactMatrix([[k, k + 1], [k + 2, k + 3]]) for k in (1, 10, 20))
    Z = ExactMatrix.zeros(2)
    expected = ExactMatrix.from_blocks([[A, B, C], [Z, A, B], [Z, Z, A]])
    assert toeplitz_upper([A, B, C]) == expected


def test_toeplitz_mismatched_blocks():
    with pytest.raises(ValueError):
        toeplitz_upper([ExactMatrix.zeros(2), ExactMatrix.zeros(1)])


def test_toeplitz_alternating_examples():
    assert toeplitz_alternating(scalars(5)) == ExactMatrix([[5]])
    assert toeplitz_alternating(scalars(1, 2)) == ExactMatrix([[1, 2], [0, -1]])
    T = toeplitz_alternating(scalars(1, 2, 3))
    assert T.row(1) == (gq(0), gq(-1), gq(-2))
    assert T.row(2) == (gq(0), gq(0), gq(1))


def test_gamma_examples():
    assert gamma(1) == ExactMatrix([[1]])
    assert gamma(2) == ExactMatrix([[0, 1], [-1, 0]])
    assert gamma(3) == ExactMatrix([[0, 0, 1], [0, -1, 0], [1, 0, 0]])
    with pytest.raises(ValueError):
        gamma(0)


@pytest.mark.parametrize("m", range(1, 13))
def test_gamma_identities(m):
    G = gamma(m)
    sign = (-1) ** (m + 1)
    assert G.T == G.inverse() == G * sign
    assert G == exchange(m) @ sign_diag(m) * (-1) ** m


def test_exchange_and_sign_diag():
    assert exchange(2, 1) == ExactMatrix([[0, 1], [1, 0]])
    assert exchange(1, 3) == ExactMatrix.identity(3)
    E = exchange(2, 2)
    assert E @ E == ExactMatrix.identity(4)
    assert sign_diag(1) == ExactMatrix([[-1]])
    assert sign_diag(2) == ExactMatrix.diag([-1, 1])
    for a in range(1, 6):
        assert sign_diag(a) @ sign_diag(a) == ExactMatrix.identity(a)


@pytest.mark.parametrize("alpha,m", [(1, 3), (3, 1), (2, 3), (3, 2), (4, 4)])
def test_shuffle_is_permutation(alpha, m):
    W = shuffle(alpha, m)
    assert W.T @ W == ExactMatrix.identity(alpha * m)
    assert sum(1 for x in W.entries() if x) == alpha * m


def test_shuffle_trivial_cases():
    assert shuffle(1, 4) == ExactMatrix.identity(4)
    assert shuffle(4, 1) == ExactMatrix.identity(4)


def test_shuffle_groups_toeplitz_display():
    a = {i: 10 + i for i in range(1, 7)}
    b = {i: 20 + i for i in range(1, 7)}
    rows = []
    for R in range(2):
        for t in range(3):
            row = []
            for C in range(3):
                k = 3 * R + C + 1
                row += [[a[k], b[k]], [0, a[k]], [0, 0]][t]
            rows.append(row)
    grouped = ExactMatrix([
        [a[1], a[2], a[3], b[1], b[2], b[3]],
        [a[4], a[5], a[6], b[4], b[5], b[6]],
        [0, 0, 0, a[1], a[2], a[3]],
        [0, 0, 0, a[4], a[5], a[6]],
        [0] * 6,
        [0] * 6,
    ])
    assert shuffle(3, 2).T @ ExactMatrix(rows) @ shuffle(2, 3) == grouped


def test_block_shuffle_pairs():
    assert block_shuffle_pairs([3]) == ExactMatrix.identity(6)
    P = block_shuffle_pairs([1, 1])
    assert P == shuffle(2, 2)
    # pairs (J_r, J_r') are regrouped as all J's first
    J1, J1p, J2, J2p = (ExactMatrix([[k]]) for k in (1, 2, 3, 4))
    M = direct_sum(J1, J1p, J2, J2p)
    assert P.T @ M @ P == direct_sum(J1, J2, J1p, J2p)


@st.composite
def alternating_inputs(draw):
    c = draw(st.sampled_from((1, 2)))
    alpha = draw(st.integers(1, 5))
    size = draw(st.integers(1, 3))
    blocks = [draw(parity_matrices(size, (-1) ** (alpha - j + c))) for j in range(alpha)]
    return c, alpha, size, blocks


@given(alternating_inputs())
def test_alternating_toeplitz_exchange_identity(data):
    c, alpha, size, blocks = data
    T = toeplitz_alternating(blocks)
    E = exchange(alpha, size)
    assert E @ T.T @ E == T * (-1) ** (c + 1)
