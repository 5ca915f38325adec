"""Commutants of one-eigenvalue Jordan matrices and the block Toeplitz group.

A matrix commuting with ``J = (+)_r (+)^{mu_r} J_{alpha_r}(lam)`` is a block
matrix of rectangular upper triangular Toeplitz blocks.  Conjugating by the
perfect shuffle ``Omega = (+)_r Omega_{alpha_r, mu_r}`` regroups it into an
``alpha_r x alpha_s`` grid of ``mu_r x mu_s`` coefficient blocks, which is the
representation :class:`BlockToeplitzMatrix` stores.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Iterable, Mapping, Sequence

from .exact import ONE, ZERO, ExactMatrix, GaussianRational, SingularMatrixError, as_scalar, sparse_rank
from .structured import direct_sum, jordan_block, shuffle, toeplitz_upper

__all__ = [
    "CommutantShape",
    "CommutantFamily",
    "BlockToeplitzMatrix",
    "StructureError",
    "commutant_basis",
    "exp_nilpotent_jordan",
    "commutant_coincidence_check",
    "commutation_nullity",
    "pack_toeplitz",
    "unpack_toeplitz",
    "toeplitz_product",
    "toeplitz_inverse",
]


class StructureError(ValueError):
    """A dense matrix does not have the required block Toeplitz pattern."""


@dataclass(frozen=True)
class CommutantShape:
    alpha: tuple[int, ...]
    mu: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "mu", tuple(self.mu))
        if len(self.alpha) != len(self.mu) or not self.alpha:
            raise ValueError("alpha and mu must be non-empty and of equal length")
        if any(a <= b for a, b in zip(self.alpha, self.alpha[1:])) or self.alpha[-1] < 1:
            raise ValueError("alpha must be strictly decreasing positive integers")
        if any(x < 1 for x in self.mu):
            raise ValueError("mu entries must be positive")

    @property
    def N(self) -> int:
        return len(self.alpha)

    @property
    def n(self) -> int:
        return sum(a * u for a, u in zip(self.alpha, self.mu))

    def b(self, r: int, s: int) -> int:
        return min(self.alpha[r], self.alpha[s])

    def pad(self, r: int, s: int) -> int:
        """Zero columns on the left of block ``(r, s)`` (nonzero only when ``alpha_r < alpha_s``)."""
        return max(0, self.alpha[s] - self.alpha[r])

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for a, u in zip(self.alpha, self.mu):
            out.append(acc)
            acc += a * u
        return tuple(out)

    def dimension(self) -> int:
        """Number of free scalar coordinates: ``sum_{r,s} b_rs mu_r mu_s``."""
        return sum(self.b(r, s) * self.mu[r] * self.mu[s] for r in range(self.N) for s in range(self.N))

    def jordan(self, lam=0) -> ExactMatrix:
        return direct_sum(*[jordan_block(a, lam) for a, u in zip(self.alpha, self.mu) for _ in range(u)])

    def omega(self) -> ExactMatrix:
        return direct_sum(*[shuffle(a, u) for a, u in zip(self.alpha, self.mu)])


def exp_nilpotent_jordan(alpha: int) -> ExactMatrix:
    """``exp(J_alpha(0))``: unipotent Toeplitz with first row ``1/j!``."""
    if alpha < 1:
        raise ValueError("alpha must be positive")
    return toeplitz_upper([ExactMatrix([[GaussianRational(f"1/{factorial(j)}")]]) for j in range(alpha)])


class CommutantFamily:
    """All solutions of ``J X = X J`` as a linear family over named coordinates.

    Coordinates are ``(r, s, j, k, n)``: coefficient ``n`` of the Toeplitz
    block in position ``(j, k)`` of the ``(r, s)`` block; ordered by ``(r, s)``,
    then ``(j, k)`` row-major, then ``n`` (reading order of first rows).
    """

    def __init__(self, shape: CommutantShape, lam=0):
        self.shape = shape
        self.lam = as_scalar(lam)
        sh = shape
        self.coordinates = [
            (r, s, j, k, n)
            for r in range(sh.N) for s in range(sh.N)
            for j in range(sh.mu[r]) for k in range(sh.mu[s])
            for n in range(sh.b(r, s))
        ]

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def jordan(self) -> ExactMatrix:
        return self.shape.jordan(self.lam)

    def expand(self, values: Sequence) -> ExactMatrix:
        if len(values) != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinate values, got {len(values)}")
        sh = self.shape
        entries: dict[tuple[int, int], GaussianRational] = {}
        for (r, s, j, k, n), v in zip(self.coordinates, values):
            v = as_scalar(v)
            if not v:
                continue
            pad = sh.pad(r, s)
            r0 = sh.offsets[r] + j * sh.alpha[r]
            c0 = sh.offsets[s] + k * sh.alpha[s]
            for a in range(sh.b(r, s) - n):
                entries[(r0 + a, c0 + pad + a + n)] = v
        return ExactMatrix.from_entries(sh.n, sh.n, entries)

    def basis(self) -> list[ExactMatrix]:
        d = self.dimension
        return [self.expand([1 if i == q else 0 for i in range(d)]) for q in range(d)]


def commutant_basis(shape: CommutantShape, lam=0) -> CommutantFamily:
    return CommutantFamily(shape, lam)


def commutation_nullity(left: ExactMatrix, right: ExactMatrix | None = None) -> int:
    """Dimension of ``{X : left X = X right}`` by brute-force Kronecker linearization."""
    right = left if right is None else right
    p, q = left.rows, right.rows
    lnz, rnz = left._nonzeros(), right.T._nonzeros()
    rows = []
    for i in range(p):
        for j in range(q):
            eq: dict[int, GaussianRational] = {}
            for k, v in lnz[i]:
                idx = k * q + j
                eq[idx] = eq.get(idx, ZERO) + v
            for k, v in rnz[j]:
                idx = i * q + k
                eq[idx] = eq.get(idx, ZERO) - v
            rows.append(eq)
    return p * q - sparse_rank(rows)


def commutant_coincidence_check(shape: CommutantShape) -> bool:
    """Check that ``J_0`` and ``exp(J_0)`` have the same commutant (brute force)."""
    j0 = shape.jordan(0)
    e0 = direct_sum(*[exp_nilpotent_jordan(a) for a, u in zip(shape.alpha, shape.mu) for _ in range(u)])
    d1 = commutation_nullity(j0)
    d2 = commutation_nullity(e0)
    if d1 != d2 or d1 != shape.dimension():
        return False
    return all(e0 @ x == x @ e0 for x in commutant_basis(shape).basis())


@dataclass(frozen=True, eq=False)
class BlockToeplitzMatrix:
    """Element of the block Toeplitz algebra, stored by coefficient blocks ``A_n^{rs}``.

    ``coeffs[(r, s)]`` is a tuple of ``b_rs`` matrices of size ``mu_r x mu_s``;
    indices ``r, s`` are 0-based.
    """

    shape: CommutantShape
    coeffs: Mapping[tuple[int, int], tuple[ExactMatrix, ...]]

    def __post_init__(self):
        sh = self.shape
        fixed = {}
        for r in range(sh.N):
            for s in range(sh.N):
                blocks = tuple(self.coeffs.get((r, s), ()))
                if not blocks:
                    blocks = tuple(ExactMatrix.zeros(sh.mu[r], sh.mu[s]) for _ in range(sh.b(r, s)))
                if len(blocks) != sh.b(r, s):
                    raise StructureError(f"block ({r},{s}) needs {sh.b(r, s)} coefficients")
                for bl in blocks:
                    if bl.shape != (sh.mu[r], sh.mu[s]):
                        raise StructureError(f"coefficient of block ({r},{s}) has wrong size {bl.shape}")
                fixed[(r, s)] = blocks
        object.__setattr__(self, "coeffs", fixed)

    @classmethod
    def identity(cls, shape: CommutantShape) -> "BlockToeplitzMatrix":
        coeffs = {}
        for r in range(shape.N):
            u = shape.mu[r]
            coeffs[(r, r)] = (ExactMatrix.identity(u),) + tuple(
                ExactMatrix.zeros(u) for _ in range(shape.alpha[r] - 1))
        return cls(shape, coeffs)

    def coefficient(self, r: int, s: int, n: int) -> ExactMatrix:
        return self.coeffs[(r, s)][n]

    @cached_property
    def dense(self) -> ExactMatrix:
        sh = self.shape
        starts = []
        acc = 0
        for a, u in zip(sh.alpha, sh.mu):
            starts.append(acc)
            acc += a * u
        entries: dict[tuple[int, int], GaussianRational] = {}
        for (r, s), blocks in self.coeffs.items():
            pad, ur, us = sh.pad(r, s), sh.mu[r], sh.mu[s]
            for n, blk in enumerate(blocks):
                nz = blk._nonzeros()
                if not any(nz):
                    continue
                for k in range(sh.alpha[r]):
                    kk = k + pad + n
                    if kk >= sh.alpha[s]:
                        break
                    r0 = starts[r] + k * ur
                    c0 = starts[s] + kk * us
                    for i, row in enumerate(nz):
                        for j, v in row:
                            entries[(r0 + i, c0 + j)] = v
        return ExactMatrix.from_entries(acc, acc, entries)

    @classmethod
    def from_dense(cls, X: ExactMatrix, shape: CommutantShape) -> "BlockToeplitzMatrix":
        """Read coefficients off the first block rows and verify the full pattern."""
        if X.shape != (shape.n, shape.n):
            raise StructureError(f"expected a {shape.n}x{shape.n} matrix, got {X.shape}")
        sh = shape
        starts = []
        acc = 0
        for a, u in zip(sh.alpha, sh.mu):
            starts.append(acc)
            acc += a * u
        coeffs = {}
        for r in range(sh.N):
            for s in range(sh.N):
                ur, us, pad = sh.mu[r], sh.mu[s], sh.pad(r, s)
                coeffs[(r, s)] = tuple(
                    X.submatrix(starts[r], starts[r] + ur,
                                starts[s] + (pad + n) * us, starts[s] + (pad + n + 1) * us)
                    for n in range(sh.b(r, s)))
        out = cls(shape, coeffs)
        if out.dense != X:
            diff = (X - out.dense).first_nonzero()
            raise StructureError(f"matrix is not block Toeplitz for shape {shape}; first violation at {diff[:2]}")
        return out

    @property
    def diagonal_nonsingular(self) -> bool:
        return all(self.coeffs[(r, r)][0].det() for r in range(self.shape.N))

    def __matmul__(self, other: "BlockToeplitzMatrix") -> "BlockToeplitzMatrix":
        return toeplitz_product(self, other)

    def __eq__(self, other):
        if not isinstance(other, BlockToeplitzMatrix):
            return NotImplemented
        return self.shape == other.shape and self.coeffs == other.coeffs

    def inverse(self) -> "BlockToeplitzMatrix":
        return toeplitz_inverse(self)

    def diagonal_part(self) -> "BlockToeplitzMatrix":
        """The block-diagonal factor ``D`` (only ``A_0^{rr}`` kept)."""
        sh = self.shape
        coeffs = {}
        for r in range(sh.N):
            u = sh.mu[r]
            coeffs[(r, r)] = (self.coeffs[(r, r)][0],) + tuple(ExactMatrix.zeros(u) for _ in range(sh.alpha[r] - 1))
        return BlockToeplitzMatrix(sh, coeffs)

    def unipotent_part(self) -> "BlockToeplitzMatrix":
        """The factor ``V`` with ``self == D @ V`` and identity diagonal coefficients."""
        return toeplitz_product(toeplitz_inverse(self.diagonal_part()), self)

    def to_json(self) -> dict:
        return {
            "alpha": list(self.shape.alpha),
            "mu": list(self.shape.mu),
            "coeffs": {f"{r + 1},{s + 1}": [b.to_json() for b in blocks]
                       for (r, s), blocks in sorted(self.coeffs.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BlockToeplitzMatrix":
        extra = set(obj) - {"alpha", "mu", "coeffs"}
        if extra:
            raise ValueError(f"unknown fields {sorted(extra)}")
        shape = CommutantShape(tuple(obj["alpha"]), tuple(obj["mu"]))
        coeffs = {}
        for key, blocks in obj["coeffs"].items():
            r, s = (int(t) - 1 for t in key.split(","))
            coeffs[(r, s)] = tuple(ExactMatrix.from_json(b) for b in blocks)
        return cls(shape, coeffs)


def pack_toeplitz(X: ExactMatrix, shape: CommutantShape) -> BlockToeplitzMatrix:
    """``Omega^T X Omega`` as a :class:`BlockToeplitzMatrix`; ``X`` must be commutant-shaped."""
    omega = shape.omega()
    return BlockToeplitzMatrix.from_dense(omega.T @ X @ omega, shape)


def unpack_toeplitz(Y: BlockToeplitzMatrix) -> ExactMatrix:
    omega = Y.shape.omega()
    return omega @ Y.dense @ omega.T


def toeplitz_product(X: BlockToeplitzMatrix, Y: BlockToeplitzMatrix) -> BlockToeplitzMatrix:
    if X.shape != Y.shape:
        raise ValueError("shape mismatch")
    return BlockToeplitzMatrix.from_dense(X.dense @ Y.dense, X.shape)


def toeplitz_inverse(X: BlockToeplitzMatrix) -> BlockToeplitzMatrix:
    for r in range(X.shape.N):
        if not X.coeffs[(r, r)][0].det():
            raise SingularMatrixError(f"diagonal coefficient A_0 of block {r + 1} is singular")
    return BlockToeplitzMatrix.from_dense(X.dense.inverse(), X.shape)
