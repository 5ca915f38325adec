"""Structured matrix constructors: Toeplitz variants, exchange/sign matrices, shuffles."""

from __future__ import annotations

from typing import Sequence

from .exact import ONE, ZERO, ExactMatrix, as_scalar

__all__ = [
    "direct_sum",
    "jordan_block",
    "toeplitz_upper",
    "toeplitz_alternating",
    "gamma",
    "exchange",
    "sign_diag",
    "shuffle",
    "block_shuffle_pairs",
    "kron_identity",
    "identity_kron",
    "superdiagonal",
    "permutation_matrix",
]


def direct_sum(*mats: ExactMatrix) -> ExactMatrix:
    """Block-diagonal direct sum of (possibly rectangular) matrices."""
    if len(mats) == 1 and not isinstance(mats[0], ExactMatrix):
        mats = tuple(mats[0])
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = []
    c0 = 0
    for m in mats:
        left = (ZERO,) * c0
        right = (ZERO,) * (cols - c0 - m.cols)
        for r in m._data:
            out.append(left + r + right)
        c0 += m.cols
    return ExactMatrix._wrap(tuple(out), rows, cols)


def jordan_block(size: int, eigenvalue=0) -> ExactMatrix:
    lam = as_scalar(eigenvalue)
    entries = {}
    for i in range(size):
        if lam:
            entries[(i, i)] = lam
        if i + 1 < size:
            entries[(i, i + 1)] = ONE
    return ExactMatrix.from_entries(size, size, entries)


def _check_blocks(blocks: Sequence[ExactMatrix]) -> tuple[int, int]:
    if not blocks:
        raise ValueError("at least one block is required")
    shape = blocks[0].shape
    if any(b.shape != shape for b in blocks):
        raise ValueError("all Toeplitz coefficient blocks must have the same size")
    return shape


def toeplitz_upper(blocks: Sequence[ExactMatrix]) -> ExactMatrix:
    """Block upper triangular Toeplitz matrix with first block row ``blocks``."""
    blocks = [b if isinstance(b, ExactMatrix) else ExactMatrix([[b]]) for b in blocks]
    p, q = _check_blocks(blocks)
    k = len(blocks)
    grid = [[blocks[j - i] if j >= i else None for j in range(k)] for i in range(k)]
    return ExactMatrix.from_blocks(grid, [p] * k, [q] * k)


def toeplitz_alternating(blocks: Sequence[ExactMatrix]) -> ExactMatrix:
    """Alternating upper triangular Toeplitz: each step down a diagonal flips sign."""
    blocks = [b if isinstance(b, ExactMatrix) else ExactMatrix([[b]]) for b in blocks]
    p, q = _check_blocks(blocks)
    k = len(blocks)
    neg = [-b for b in blocks]
    grid = [[(blocks if i % 2 == 0 else neg)[j - i] if j >= i else None for j in range(k)]
            for i in range(k)]
    return ExactMatrix.from_blocks(grid, [p] * k, [q] * k)


def gamma(m: int) -> ExactMatrix:
    """Anti-diagonal matrix with alternating signs, top-right entry ``+1``.

    Row ``i`` (1-based) holds ``(-1)**(i+1)`` in column ``m+1-i``, so that
    ``gamma(m).T == gamma(m).inverse() == (-1)**(m+1) * gamma(m)``.
    """
    if m < 1:
        raise ValueError("gamma requires m >= 1")
    return ExactMatrix.from_entries(m, m, {(i, m - 1 - i): (1 if i % 2 == 0 else -1) for i in range(m)})


def exchange(alpha: int, m: int = 1) -> ExactMatrix:
    """Block exchange matrix ``E_alpha(I_m)``: identities on the block anti-diagonal."""
    if alpha < 1 or m < 1:
        raise ValueError("exchange requires alpha, m >= 1")
    n = alpha * m
    return ExactMatrix.from_entries(
        n, n, {((alpha - 1 - k) * m + t, k * m + t): 1 for k in range(alpha) for t in range(m)})


def sign_diag(alpha: int) -> ExactMatrix:
    """``diag(-1, 1, -1, ..., (-1)**alpha)``."""
    if alpha < 1:
        raise ValueError("sign_diag requires alpha >= 1")
    return ExactMatrix.diag([(-1) ** k for k in range(1, alpha + 1)])


def permutation_matrix(columns: Sequence[int]) -> ExactMatrix:
    """Matrix whose ``q``-th column is the standard basis vector ``e_{columns[q]}``."""
    n = len(columns)
    if sorted(columns) != list(range(n)):
        raise ValueError("not a permutation")
    return ExactMatrix.from_entries(n, n, {(c, q): 1 for q, c in enumerate(columns)})


def shuffle(alpha: int, m: int) -> ExactMatrix:
    """Perfect shuffle ``[e_1 e_{a+1} ... e_{(m-1)a+1} e_2 ...]`` of size ``alpha*m``.

    Conjugating an ``m x m`` block matrix of ``alpha x alpha`` Toeplitz blocks
    by it yields an ``alpha x alpha`` block Toeplitz matrix of ``m x m`` blocks.
    """
    if alpha < 1 or m < 1:
        raise ValueError("shuffle requires alpha, m >= 1")
    return permutation_matrix([j * alpha + k for k in range(alpha) for j in range(m)])


def block_shuffle_pairs(block_sizes: Sequence[int]) -> ExactMatrix:
    """Block permutation reordering ``2N`` blocks as ``1, 3, ..., 2N-1, 2, 4, ..., 2N``.

    Blocks ``2r-1`` and ``2r`` both have size ``block_sizes[r-1]``.
    """
    if any(s < 1 for s in block_sizes):
        raise ValueError("block sizes must be positive")
    sizes = [s for s in block_sizes for _ in (0, 1)]
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    order = list(range(0, len(sizes), 2)) + list(range(1, len(sizes), 2))
    cols = [offsets[b] + t for b in order for t in range(sizes[b])]
    return permutation_matrix(cols)


def kron_identity(a: ExactMatrix, m: int) -> ExactMatrix:
    """``a (x) I_m``: every entry of ``a`` becomes a scalar multiple of ``I_m``."""
    entries = {}
    for i, row in enumerate(a._nonzeros()):
        for j, v in row:
            for t in range(m):
                entries[(i * m + t, j * m + t)] = v
    return ExactMatrix.from_entries(a.rows * m, a.cols * m, entries)


def identity_kron(m: int, a: ExactMatrix) -> ExactMatrix:
    """``I_m (x) a``: ``m`` diagonal copies of ``a``."""
    return direct_sum(*([a] * m))


def superdiagonal(size: int, k: int, block: ExactMatrix) -> ExactMatrix:
    """``size x size`` block matrix with ``block`` on the ``k``-th block superdiagonal."""
    zero = ExactMatrix.zeros(block.rows, block.cols)
    return toeplitz_upper([block if j == k else zero for j in range(size)])
