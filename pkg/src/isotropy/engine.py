"""Centralizer engine: the structured congruence solver, unipotent generators,
dimension formulas and assembled centralizer models with seeded samplers.

The central equation is ``C = F X^T F B X`` for ``X`` in the block Toeplitz group,
with ``B``, ``C`` block diagonal alternating Toeplitz and ``F`` the block exchange.
Indices ``r, s, k`` are 0-based throughout the Python API (JSON output is 1-based).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Mapping, Sequence

from .commutant import BlockToeplitzMatrix, CommutantShape
from .errors import DomainError
from .exact import ONE, ZERO, ExactMatrix, GaussianRational, SingularMatrixError, gq
from .normal_forms import (
    NormalFormBundle,
    base_form,
    build_mixed_normal_form,
    bundle_for,
    check_disjoint_spectra,
)
from .shapes import ShapeSpec
from .structured import direct_sum, exchange, toeplitz_alternating

__all__ = [
    "AlternatingFormPair",
    "FreeParameterSet",
    "CongruenceSolverState",
    "CentralizerModel",
    "ConsistencyError",
    "solve_structured_congruence",
    "centralizer_dimension",
    "dimension_variants",
    "generator_diagonal_unipotent",
    "generator_offdiagonal",
    "diagonal_unipotent",
    "offdiagonal_unipotent",
    "reflection",
    "catalan_coefficient",
    "catalan_recursion",
    "root_series_coefficient",
    "build_centralizer_nilpotent",
    "build_centralizer_nonzero",
    "build_centralizer",
    "assemble_mixed",
    "real_admissibility",
    "signature",
    "cayley_automorphism",
    "random_automorphism",
]

HALF = GaussianRational("1/2")


class ConsistencyError(ArithmeticError):
    """A right-hand side lost the symmetry the recursion guarantees (a bug or bad input)."""


def _parity_ok(M: ExactMatrix, sign: int) -> bool:
    return M.T == (M if sign == 1 else -M)


# ---------------------------------------------------------------------------
# forms and parameters


class AlternatingFormPair:
    """``B = (+)_r T_a(B_0^r, ..., B_{alpha_r-1}^r)`` and ``C`` likewise, plus ``c``.

    Coefficient ``j`` of block ``r`` must satisfy ``M^T = (-1)^(alpha_r - j + c) M``;
    ``B_0^r`` and ``C_0^r`` must be nonsingular.
    """

    def __init__(self, c: int, alpha: Sequence[int], mu: Sequence[int],
                 B: Sequence[Sequence[ExactMatrix]], C: Sequence[Sequence[ExactMatrix]] | None = None):
        if c not in (1, 2):
            raise DomainError("c must be 1 or 2")
        self.c = c
        self.shape = CommutantShape(tuple(alpha), tuple(mu))
        self.B = self._normalize(B, "B")
        self.C = self.B if C is None else self._normalize(C, "C")

    def _normalize(self, seqs, name):
        sh = self.shape
        if len(seqs) != sh.N:
            raise DomainError(f"{name} needs one coefficient sequence per block")
        out = []
        for r, seq in enumerate(seqs):
            seq = list(seq)
            a, u = sh.alpha[r], sh.mu[r]
            if len(seq) > a:
                raise DomainError(f"{name}^{r + 1} has more than alpha_r coefficients")
            seq += [ExactMatrix.zeros(u)] * (a - len(seq))
            for j, M in enumerate(seq):
                if M.shape != (u, u):
                    raise DomainError(f"{name}_{j}^{r + 1} must be {u}x{u}")
                if not _parity_ok(M, (-1) ** (a - j + self.c)):
                    kind = "symmetric" if (a - j + self.c) % 2 == 0 else "skew-symmetric"
                    raise DomainError(f"{name}_{j}^{r + 1} must be {kind}")
            if not seq[0].det():
                raise DomainError(f"{name}_0^{r + 1} must be nonsingular")
            out.append(tuple(seq))
        return tuple(out)

    @classmethod
    def block_diagonal(cls, c: int, alpha: Sequence[int], base_forms: Sequence[ExactMatrix]) -> "AlternatingFormPair":
        """``B = C = (+)_r T_a(B_r, 0, ..., 0)``."""
        mu = [b.rows for b in base_forms]
        return cls(c, alpha, mu, [[b] for b in base_forms])

    @property
    def diagonal_only(self) -> bool:
        return self.C is self.B and all(M.is_zero() for seq in self.B for M in seq[1:])

    def base(self, r: int) -> ExactMatrix:
        return self.B[r][0]

    def dense_B(self) -> ExactMatrix:
        return direct_sum(*[toeplitz_alternating(seq) for seq in self.B])

    def dense_C(self) -> ExactMatrix:
        return direct_sum(*[toeplitz_alternating(seq) for seq in self.C])

    def dense_F(self) -> ExactMatrix:
        return direct_sum(*[exchange(a, u) for a, u in zip(self.shape.alpha, self.shape.mu)])

    def residual(self, X: BlockToeplitzMatrix | ExactMatrix) -> ExactMatrix:
        """``C - F X^T F B X``; zero exactly when ``X`` solves the equation."""
        Xd = X.dense if isinstance(X, BlockToeplitzMatrix) else X
        F = self.dense_F()
        return self.dense_C() - F @ Xd.T @ F @ self.dense_B() @ Xd

    def free_dimension(self) -> int:
        """Parameter count of the solution set (sym/skew spaces counted over the field)."""
        sh, c = self.shape, self.c
        total = sum(sh.b(r, s) * sh.mu[r] * sh.mu[s] for r in range(sh.N) for s in range(r))
        for r in range(sh.N):
            u, a = sh.mu[r], sh.alpha[r]
            for j in range(a):
                # j = 0 counts the automorphism group of B_0, which has the same
                # dimension as the Lie algebra {Z : Z^T = (-1)^(a+c+1) Z}.
                sym = (a - j + c + 1) % 2 == 0
                total += u * (u + 1) // 2 if sym else u * (u - 1) // 2
        return total


@dataclass(frozen=True, eq=False)
class FreeParameterSet:
    """Free choices of the solver.

    ``below[(r, s)]`` for ``r > s``: ``b_rs`` coefficients of size ``mu_r x mu_s``.
    ``base[r]``: ``A_0^{rr}`` with ``C_0^r = (A_0^{rr})^T B_0^r A_0^{rr}``.
    ``Z[(r, j)]`` for ``1 <= j < alpha_r``: ``Z^T = (-1)^(alpha_r - j + c + 1) Z``.
    Missing entries default to zero.
    """

    base: tuple[ExactMatrix, ...]
    below: Mapping[tuple[int, int], tuple[ExactMatrix, ...]] = field(default_factory=dict)
    Z: Mapping[tuple[int, int], ExactMatrix] = field(default_factory=dict)

    @classmethod
    def identity(cls, forms: AlternatingFormPair) -> "FreeParameterSet":
        return cls(base=tuple(ExactMatrix.identity(u) for u in forms.shape.mu))

    def below_coeff(self, shape: CommutantShape, r: int, s: int) -> tuple[ExactMatrix, ...]:
        got = self.below.get((r, s))
        if got is None:
            return tuple(ExactMatrix.zeros(shape.mu[r], shape.mu[s]) for _ in range(shape.b(r, s)))
        return tuple(got)

    def z(self, shape: CommutantShape, r: int, j: int) -> ExactMatrix:
        got = self.Z.get((r, j))
        return ExactMatrix.zeros(shape.mu[r]) if got is None else got

    def validate(self, forms: AlternatingFormPair) -> None:
        sh, c = forms.shape, forms.c
        if len(self.base) != sh.N:
            raise DomainError("one base automorphism per block is required")
        for r, A0 in enumerate(self.base):
            if A0.shape != (sh.mu[r], sh.mu[r]):
                raise DomainError(f"A_0^{{{r + 1}{r + 1}}} must be {sh.mu[r]}x{sh.mu[r]}")
            if A0.T @ forms.B[r][0] @ A0 != forms.C[r][0]:
                raise DomainError(f"base equation C_0 = A_0^T B_0 A_0 fails for block {r + 1}")
        for (r, s), blocks in self.below.items():
            if not r > s:
                raise DomainError("free off-diagonal coefficients must lie below the diagonal")
            if len(blocks) != sh.b(r, s) or any(b.shape != (sh.mu[r], sh.mu[s]) for b in blocks):
                raise DomainError(f"block ({r + 1},{s + 1}) needs {sh.b(r, s)} matrices of size "
                                  f"{sh.mu[r]}x{sh.mu[s]}")
        for (r, j), Zm in self.Z.items():
            if not 1 <= j < sh.alpha[r]:
                raise DomainError(f"Z index j={j} out of range for block {r + 1}")
            if Zm.shape != (sh.mu[r], sh.mu[r]):
                raise DomainError(f"Z_{j}^{r + 1} has wrong size")
            if not _parity_ok(Zm, (-1) ** (sh.alpha[r] - j + c + 1)):
                raise DomainError(f"Z_{j}^{r + 1} violates its parity constraint")

    def to_json(self) -> dict:
        return {
            "base": {str(r + 1): A.to_json() for r, A in enumerate(self.base)},
            "below": {f"{r + 1},{s + 1}": [b.to_json() for b in blocks]
                      for (r, s), blocks in sorted(self.below.items())},
            "Z": {f"{r + 1},{j}": Zm.to_json() for (r, j), Zm in sorted(self.Z.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FreeParameterSet":
        base = tuple(ExactMatrix.from_json(obj["base"][k]) for k in sorted(obj["base"], key=int))
        below = {}
        for key, blocks in obj.get("below", {}).items():
            r, s = (int(t) - 1 for t in key.split(","))
            below[(r, s)] = tuple(ExactMatrix.from_json(b) for b in blocks)
        Z = {}
        for key, m in obj.get("Z", {}).items():
            r, j = (int(t) for t in key.split(","))
            Z[(r - 1, j)] = ExactMatrix.from_json(m)
        return cls(base=base, below=below, Z=Z)


# ---------------------------------------------------------------------------
# the solver


class DependencyError(RuntimeError):
    """The recursion read a coefficient before computing it."""


class CongruenceSolverState:
    """Coefficient table plus the intermediate quantities of each recursion step.

    ``phi(k, s, n) = sum_i B_{n-i}^k A_i^{ks}`` and
    ``psi(k, r, s, n) = sum_l (-1)^l (A_l^{kr})^T phi(k, s, n-l)`` (zero for ``n < 0``).
    Block ``(r, s)``, coefficient ``n`` of ``F X^T F B X`` (for ``s >= r``, after
    stripping the alternating row signs) is ``sum_k (-1)^{pad(r,k)}
    psi(k, r, s, n - pad(r,k) - pad(k,s))``.  The ``k = r`` term with the unknown
    set to zero is ``xi``, ``k > r`` terms give ``Xi`` and ``k < r`` terms ``Lambda``.
    """

    def __init__(self, forms: AlternatingFormPair, params: FreeParameterSet):
        self.forms = forms
        sh = forms.shape
        self.shape = sh
        self.coeffs: dict[tuple[int, int], list[ExactMatrix | None]] = {
            (r, s): [None] * sh.b(r, s) for r in range(sh.N) for s in range(sh.N)}
        for r in range(sh.N):
            for s in range(r):
                self.coeffs[(r, s)] = list(params.below_coeff(sh, r, s))
            self.coeffs[(r, r)][0] = params.base[r]
        self.pending: tuple[int, int, int] | None = None
        self.steps: list[dict[str, Any]] = []
        self._zeros = {(r, s): ExactMatrix.zeros(sh.mu[r], sh.mu[s]) for r in range(sh.N) for s in range(sh.N)}

    def coef(self, k: int, s: int, i: int) -> ExactMatrix:
        if i < 0 or i >= self.shape.b(k, s):
            return self._zeros[(k, s)]
        v = self.coeffs[(k, s)][i]
        if v is None:
            if self.pending == (k, s, i):
                return self._zeros[(k, s)]
            raise DependencyError(f"A_{i}^{{{k + 1}{s + 1}}} read before it was computed")
        return v

    def bcoef(self, k: int, i: int) -> ExactMatrix:
        seq = self.forms.B[k]
        return seq[i] if 0 <= i < len(seq) else self._zeros[(k, k)]

    def phi(self, k: int, s: int, n: int) -> ExactMatrix:
        acc = self._zeros[(k, s)]
        for i in range(n + 1):
            A = self.coef(k, s, i)
            Bk = self.bcoef(k, n - i)
            if not A.is_zero() and not Bk.is_zero():
                acc = acc + Bk @ A
        return acc

    def psi(self, k: int, r: int, s: int, n: int) -> ExactMatrix:
        acc = self._zeros[(r, s)]
        if n < 0:
            return acc
        for l in range(n + 1):
            A = self.coef(k, r, l)
            if A.is_zero():
                continue
            P = self.phi(k, s, n - l)
            if P.is_zero():
                continue
            term = A.T @ P
            acc = acc - term if l % 2 else acc + term
        return acc

    def contribution(self, k: int, r: int, s: int, n: int) -> ExactMatrix:
        sh = self.shape
        pad_rk, pad_ks = sh.pad(r, k), sh.pad(k, s)
        term = self.psi(k, r, s, n - pad_rk - pad_ks + sh.pad(r, s))
        return -term if pad_rk % 2 else term

    def first_row_coefficient(self, r: int, s: int, n: int) -> ExactMatrix:
        acc = self._zeros[(r, s)]
        for k in range(self.shape.N):
            acc = acc + self.contribution(k, r, s, n)
        return acc

    def _split(self, r: int, s: int, j: int):
        xi = self.contribution(r, r, s, j)
        Xi = self._zeros[(r, s)]
        Lam = self._zeros[(r, s)]
        for k in range(self.shape.N):
            if k > r:
                Xi = Xi + self.contribution(k, r, s, j)
            elif k < r:
                Lam = Lam + self.contribution(k, r, s, j)
        return xi, Xi, Lam

    def solve_diagonal(self, r: int, j: int, Zm: ExactMatrix) -> None:
        a, c = self.shape.alpha[r], self.forms.c
        self.pending = (r, r, j)
        xi, Xi, Lam = self._split(r, r, j)
        D = xi + Xi + Lam
        M = self.forms.C[r][j] - D
        if not _parity_ok(M, (-1) ** (a - j + c)):
            raise ConsistencyError(f"right-hand side for A_{j}^{{{r + 1}{r + 1}}} lost its symmetry")
        A0 = self.coeffs[(r, r)][0]
        value = A0 @ self.forms.C[r][0].inverse() @ (Zm + M * HALF)
        self.coeffs[(r, r)][j] = value
        self.pending = None
        self.steps.append({"j": j, "r": r, "p": 0, "xi": xi, "Xi": Xi, "Lambda": Lam, "D": D, "value": value})

    def solve_offdiagonal(self, r: int, p: int, j: int) -> None:
        s = r + p
        self.pending = (r, s, j)
        xi, Xi, Lam = self._split(r, s, j)
        D = xi + Xi + Lam
        A0 = self.coeffs[(r, r)][0]
        value = -(A0 @ self.forms.C[r][0].inverse() @ D)
        self.coeffs[(r, s)][j] = value
        self.pending = None
        self.steps.append({"j": j, "r": r, "p": p, "xi": xi, "Xi": Xi, "Lambda": Lam, "D": D, "value": value})

    def result(self) -> BlockToeplitzMatrix:
        if any(v is None for seq in self.coeffs.values() for v in seq):
            raise DependencyError("solver finished with undetermined coefficients")
        return BlockToeplitzMatrix(self.shape, {k: tuple(v) for k, v in self.coeffs.items()})

    def psi_table(self) -> dict[tuple[int, int, int, int], ExactMatrix]:
        """All ``psi(k, r, s, n)`` with ``0 <= n < b_rs`` for the finished table."""
        sh = self.shape
        return {(k, r, s, n): self.psi(k, r, s, n)
                for k in range(sh.N) for r in range(sh.N) for s in range(sh.N) for n in range(sh.b(r, s))}

    def symmetry_violations(self) -> list[tuple[int, int, int, int]]:
        """Indices where ``psi(k,r,s,n)^T != (-1)^(alpha_k - n + c) psi(k,s,r,n)``."""
        table = self.psi_table()
        c, alpha = self.forms.c, self.shape.alpha
        bad = []
        for (k, r, s, n), P in table.items():
            other = table[(k, s, r, n)]
            sign = (-1) ** (alpha[k] - n + c)
            if P.T != (other if sign == 1 else -other):
                bad.append((k, r, s, n))
        return bad


def solve_structured_congruence(forms: AlternatingFormPair, params: FreeParameterSet,
                                return_state: bool = False):
    """Solve ``C = F X^T F B X`` for ``X`` in the block Toeplitz group.

    Order: for ``j = 0 .. alpha_1 - 1`` first the diagonal coefficients ``A_j^{rr}``,
    then ``A_j^{r(r+p)}`` for ``p = 1 .. N-1``.
    """
    params.validate(forms)
    sh = forms.shape
    state = CongruenceSolverState(forms, params)
    for j in range(sh.alpha[0]):
        for r in range(sh.N):
            if 1 <= j < sh.alpha[r]:
                state.solve_diagonal(r, j, params.z(sh, r, j))
        for p in range(1, sh.N):
            for r in range(sh.N - p):
                if j < sh.alpha[r + p]:
                    state.solve_offdiagonal(r, p, j)
    X = state.result()
    return (X, state) if return_state else X


# ---------------------------------------------------------------------------
# dimensions


def dimension_variants(spec: ShapeSpec) -> dict[str, int]:
    """Closed-form dimension candidates.

    Nilpotent case: ``theorem`` uses ``+(-1)^c sum_{alpha_r odd} mu_r / 2``, ``cdim``
    an unconditional minus; both use the cross term ``alpha_r mu_r mu_s`` (``s < r``).
    ``as_printed`` keeps ``alpha_s`` in the cross term.  Nonzero case: ``theorem`` is
    ``sum_{r,s} min(alpha_r, alpha_s) m_r m_s`` and ``as_printed`` the ``alpha_s`` form.
    """
    a, c = spec.alpha, spec.c
    N = len(a)
    if spec.nilpotent:
        u = spec.mu
        main = sum(Fraction(a[r] * u[r] ** 2, 2) for r in range(N))
        cross = sum(a[r] * u[r] * u[s] for r in range(N) for s in range(r))
        cross_printed = sum(a[s] * u[r] * u[s] for r in range(N) for s in range(r))
        odd = sum(Fraction(u[r], 2) for r in range(N) if a[r] % 2)
        sign = (-1) ** c
        out = {
            "theorem": main + cross + sign * odd,
            "cdim": main + cross - odd,
            "as_printed": main + cross_printed + sign * odd,
        }
    else:
        m = spec.m
        out = {
            "theorem": sum(min(a[r], a[s]) * m[r] * m[s] for r in range(N) for s in range(N)),
            "as_printed": sum(m[r] * (a[r] * m[r] + 2 * sum(a[s] * m[s] for s in range(r))) for r in range(N)),
        }
    for k, v in out.items():
        if Fraction(v).denominator != 1:
            raise ArithmeticError(f"dimension variant {k} is not an integer: {v}")
        out[k] = int(v)
    return out


class DimensionMismatch(ArithmeticError):
    """No closed-form variant agrees with the oracle."""


def centralizer_dimension(spec: ShapeSpec, confirm: bool = True) -> int:
    """Dimension of the centralizer; with ``confirm`` the oracle picks the variant.

    Without ``confirm`` the ``theorem`` variant is returned.
    """
    variants = dimension_variants(spec)
    if not confirm:
        return variants["theorem"]
    from .oracle import lie_algebra_dimension

    bundle = bundle_for(spec)
    oracle = lie_algebra_dimension(bundle.A, bundle.H)
    for key in ("theorem", "cdim", "as_printed"):
        if variants.get(key) == oracle:
            return oracle
    raise DimensionMismatch(f"{spec}: oracle {oracle} matches none of {variants}")


# ---------------------------------------------------------------------------
# Catalan coefficients


def _catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def catalan_coefficient(n: int, parity: str) -> Fraction:
    """Published closed form of ``a_n`` (``parity`` is that of ``alpha_p - alpha_t``).

    even: ``-C(n) / 2^(2n+1)``; odd: ``a_0 = -1/2``, ``4^-n (-1)^((n+1)/2) C((n-1)/2)``
    for odd ``n`` and ``0`` for even ``n >= 2``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if parity == "even":
        return Fraction(-_catalan(n), 2 ** (2 * n + 1))
    if parity != "odd":
        raise ValueError("parity must be 'even' or 'odd'")
    if n == 0:
        return Fraction(-1, 2)
    if n % 2 == 0:
        return Fraction(0)
    return Fraction((-1) ** ((n + 1) // 2) * _catalan((n - 1) // 2), 4 ** n)


def catalan_recursion(n_max: int, parity: str) -> list[Fraction]:
    """``a_0 = -1/2``, ``a_n = 1/2 (-1)^(d+1) sum_j (-1)^(j d) a_j a_(n-1-j)``, ``d`` = parity."""
    d = {"even": 0, "odd": 1}[parity]
    out = [Fraction(-1, 2)]
    for n in range(1, n_max + 1):
        s = sum((-1) ** (j * d) * out[j] * out[n - 1 - j] for j in range(n))
        out.append(Fraction((-1) ** (d + 1), 2) * s)
    return out


def root_series_coefficient(n: int, k: int) -> Fraction:
    """Coefficient ``a_n`` with ``1 + sum_{n>=1} a_(n-1) x^n = sqrt(1 - (-1)^k x)``.

    These are the coefficients the off-diagonal generator actually needs: the
    diagonal correction solves ``f(x)^2 = 1 - (-1)^k x``.  For even ``k`` they agree
    with :func:`catalan_coefficient` in the even case.
    """
    sign = (-1) ** (k * (n + 1))
    return sign * Fraction(-_catalan(n), 2 ** (2 * n + 1))


# ---------------------------------------------------------------------------
# generators


def _frac_scalar(q: Fraction) -> GaussianRational:
    return GaussianRational(q)


def _identity_coeffs(shape: CommutantShape) -> dict[tuple[int, int], list[ExactMatrix]]:
    coeffs = {}
    for r in range(shape.N):
        for s in range(shape.N):
            z = ExactMatrix.zeros(shape.mu[r], shape.mu[s])
            coeffs[(r, s)] = [z] * shape.b(r, s)
        coeffs[(r, r)][0] = ExactMatrix.identity(shape.mu[r])
    return coeffs


def _spec_forms(spec: ShapeSpec, base_forms: Sequence[ExactMatrix] | None):
    if not spec.nilpotent:
        raise DomainError("unipotent generators belong to the nilpotent case")
    forms = tuple(base_form(spec, r) for r in range(spec.N)) if base_forms is None else tuple(base_forms)
    return CommutantShape(spec.alpha, spec.mu), forms


def diagonal_unipotent(shape: CommutantShape, c: int, base_forms: Sequence[ExactMatrix], r: int,
                       Z: Sequence[ExactMatrix]) -> BlockToeplitzMatrix:
    """``T(I, W_1, ..., W_{alpha_r - 1})`` in block ``r``, identity elsewhere, with
    ``W_j = B^{-1}(Z_j - 1/2 sum_{k=1}^{j-1} (-1)^k W_k^T B W_{j-k})``."""
    a, u = shape.alpha[r], shape.mu[r]
    B = base_forms[r]
    Z = list(Z)
    if len(Z) != a - 1:
        raise DomainError(f"block {r + 1} needs {a - 1} matrices Z_1..Z_{a - 1}")
    for j, Zj in enumerate(Z, start=1):
        if Zj.shape != (u, u) or not _parity_ok(Zj, (-1) ** (a - j + c + 1)):
            raise DomainError(f"Z_{j} for block {r + 1} has wrong size or parity")
    Binv = B.inverse()
    W: list[ExactMatrix] = [ExactMatrix.identity(u)]
    for j in range(1, a):
        acc = ExactMatrix.zeros(u)
        for k in range(1, j):
            term = W[k].T @ B @ W[j - k]
            acc = acc - term if k % 2 else acc + term
        W.append(Binv @ (Z[j - 1] - acc * HALF))
    coeffs = _identity_coeffs(shape)
    coeffs[(r, r)] = W
    return BlockToeplitzMatrix(shape, {k: tuple(v) for k, v in coeffs.items()})


def generator_diagonal_unipotent(spec: ShapeSpec, r: int, Z: Sequence[ExactMatrix],
                                 base_forms: Sequence[ExactMatrix] | None = None) -> BlockToeplitzMatrix:
    shape, forms = _spec_forms(spec, base_forms)
    return diagonal_unipotent(shape, spec.c, forms, r, Z)


def offdiagonal_unipotent(shape: CommutantShape, base_forms: Sequence[ExactMatrix], p: int, t: int, k: int,
                          F: ExactMatrix) -> BlockToeplitzMatrix:
    """Unipotent solution coupling blocks ``p < t`` through ``F`` (``m_t x m_p``).

    ``A_k^{tp} = F``, ``A_k^{pt} = (-1)^(k+1) B_p^{-1} F^T B_t`` and diagonal
    corrections at multiples ``j = n d`` of ``d = 2k + alpha_p - alpha_t``:
    ``V_j^p = a_(n-1) (B_p^{-1} F^T B_t F)^n``, ``V_j^t = a_(n-1) (F B_p^{-1} F^T B_t)^n``
    with ``a`` from :func:`root_series_coefficient`.
    """
    if not 0 <= p < t < shape.N:
        raise DomainError("need 0 <= p < t < N")
    ap, at = shape.alpha[p], shape.alpha[t]
    if not 0 <= k < at:
        raise DomainError(f"shift k must satisfy 0 <= k < alpha_t = {at}")
    if F.shape != (shape.mu[t], shape.mu[p]):
        raise DomainError(f"F must be {shape.mu[t]}x{shape.mu[p]}")
    Bp, Bt = base_forms[p], base_forms[t]
    Bp_inv = Bp.inverse()
    coeffs = _identity_coeffs(shape)
    coeffs[(t, p)] = list(coeffs[(t, p)])
    coeffs[(t, p)][k] = F
    coeffs[(p, t)] = list(coeffs[(p, t)])
    coeffs[(p, t)][k] = (Bp_inv @ F.T @ Bt) * ((-1) ** (k + 1))
    d = 2 * k + ap - at
    Mp = Bp_inv @ F.T @ Bt @ F
    Mt = F @ Bp_inv @ F.T @ Bt
    for block, size, M in ((p, ap, Mp), (t, at, Mt)):
        seq = list(coeffs[(block, block)])
        power = ExactMatrix.identity(M.rows)
        n = 1
        while n * d < size:
            power = power @ M
            seq[n * d] = power * _frac_scalar(root_series_coefficient(n - 1, k))
            n += 1
        coeffs[(block, block)] = seq
    return BlockToeplitzMatrix(shape, {key: tuple(v) for key, v in coeffs.items()})


def generator_offdiagonal(spec: ShapeSpec, p: int, t: int, k: int, F: ExactMatrix,
                          base_forms: Sequence[ExactMatrix] | None = None) -> BlockToeplitzMatrix:
    shape, forms = _spec_forms(spec, base_forms)
    return offdiagonal_unipotent(shape, forms, p, t, k, F)


# ---------------------------------------------------------------------------
# base groups, inertia


def cayley_automorphism(B: ExactMatrix, W: ExactMatrix) -> ExactMatrix:
    """``(I - W)(I + W)^{-1}`` for ``B``-skew ``W``; an automorphism of ``B``."""
    if not (W.T @ B + B @ W).is_zero():
        raise DomainError("W must satisfy W^T B = -B W")
    eye = ExactMatrix.identity(W.rows)
    return (eye - W) @ (eye + W).inverse()


def reflection(B: ExactMatrix, v: ExactMatrix) -> ExactMatrix:
    """``I - 2 v v^T B / (v^T B v)`` for symmetric ``B``; determinant ``-1``."""
    q = (v.T @ B @ v)[0, 0]
    if not q:
        raise DomainError("reflection vector is B-isotropic")
    return ExactMatrix.identity(v.rows) + (v @ v.T @ B) * (gq(-2) / q)


def random_scalar(rng: random.Random, complex_ok: bool = True) -> GaussianRational:
    re = Fraction(rng.randint(-3, 3), rng.choice((1, 1, 1, 2, 3)))
    im = Fraction(rng.randint(-2, 2), rng.choice((1, 2))) if complex_ok and rng.random() < 0.25 else 0
    return GaussianRational(re, im)


def random_matrix(rng: random.Random, rows: int, cols: int, complex_ok: bool = True) -> ExactMatrix:
    return ExactMatrix([[random_scalar(rng, complex_ok) for _ in range(cols)] for _ in range(rows)])


def random_parity_matrix(rng: random.Random, size: int, sign: int, complex_ok: bool = True) -> ExactMatrix:
    """Random ``M`` with ``M^T = sign * M``."""
    M = random_matrix(rng, size, size, complex_ok)
    return M + M.T if sign == 1 else M - M.T


def random_nonsingular(rng: random.Random, size: int, complex_ok: bool = True) -> ExactMatrix:
    while True:
        M = random_matrix(rng, size, size, complex_ok)
        if M.det():
            return M


def random_automorphism(B: ExactMatrix, rng: random.Random, complex_ok: bool = True) -> ExactMatrix:
    """Seeded element of ``{Q : Q^T B Q = B}``; both components when ``B`` is symmetric."""
    symmetric = B.T == B
    if not symmetric and B.T != -B:
        raise DomainError("B must be symmetric or skew-symmetric")
    Binv = B.inverse()
    n = B.rows
    while True:
        S = random_parity_matrix(rng, n, -1 if symmetric else 1, complex_ok)
        try:
            Q = cayley_automorphism(B, Binv @ S)
        except SingularMatrixError:
            continue
        break
    if symmetric and rng.random() < 0.5:
        while True:
            v = random_matrix(rng, n, 1, complex_ok)
            if (v.T @ B @ v)[0, 0]:
                Q = Q @ reflection(B, v)
                break
    return Q


def signature(S: ExactMatrix) -> tuple[int, int, int]:
    """``(positive, negative, zero)`` inertia of a real symmetric matrix."""
    if not S.is_square or S.T != S:
        raise DomainError("signature needs a symmetric matrix")
    if any(x.im for x in S.entries()):
        raise DomainError("signature needs a real matrix")
    m = [[x.re for x in row] for row in S.tolist()]
    pos = neg = 0
    n = len(m)
    active = list(range(n))
    while active:
        piv = next((i for i in active if m[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and m[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # congruence: row/col i += row/col j makes the diagonal 2 m[i][j] nonzero
            for t in range(n):
                m[i][t] += m[j][t]
            for t in range(n):
                m[t][i] += m[t][j]
            piv = i
        p = m[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            f = m[i][piv] / p
            if f:
                for t in active:
                    m[i][t] -= f * m[piv][t]
        for i in active:
            m[i][piv] = m[piv][i] = 0
    return pos, neg, n - pos - neg


def real_admissibility(forms: AlternatingFormPair) -> bool:
    """True iff every ``B_0^r`` and ``C_0^r`` have the same inertia (real symmetric input)."""
    for r in range(forms.shape.N):
        B0, C0 = forms.B[r][0], forms.C[r][0]
        if signature(B0) != signature(C0):
            return False
    return True


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class Sample:
    Q: ExactMatrix
    toeplitz: BlockToeplitzMatrix | None
    params: dict


@dataclass(frozen=True, eq=False)
class CentralizerModel:
    """Computed centralizer: ``Q = psi^{-1} Y psi`` for ``Y`` in the block Toeplitz model group."""

    case: str
    specs: tuple[ShapeSpec, ...]
    bundle: NormalFormBundle
    psi: ExactMatrix
    psi_inv: ExactMatrix
    dimension: int
    dimension_variants: Mapping[str, int]
    forms: AlternatingFormPair | None = None
    components: tuple["CentralizerModel", ...] = ()
    complex_samples: bool = True

    @property
    def spec(self) -> ShapeSpec:
        return self.specs[0]

    @property
    def shape(self) -> CommutantShape:
        s = self.spec
        return CommutantShape(s.alpha, s.mu if s.nilpotent else s.m)

    # -- embedding --------------------------------------------------------
    def embed(self, Y: BlockToeplitzMatrix) -> ExactMatrix:
        """Map a model-group element to the centralizer in original coordinates."""
        if self.case == "nilpotent":
            return self.psi_inv @ Y.dense @ self.psi
        if self.case == "nonzero-pair":
            Xd = Y.dense
            return self.psi_inv @ direct_sum(Xd, Xd.T.inverse()) @ self.psi
        raise DomainError("mixed models embed through their components")

    # -- sampling ---------------------------------------------------------
    def draw(self, rng: random.Random) -> Sample:
        if self.case == "mixed":
            parts = [m.draw(rng) for m in self.components]
            return Sample(direct_sum(*[p.Q for p in parts]), None, {"parts": [p.params for p in parts]})
        if self.case == "nilpotent":
            params = self.random_parameters(rng)
            Y = solve_structured_congruence(self.forms, params)
            return Sample(self.embed(Y), Y, {"free_parameters": params.to_json()})
        X = self.random_toeplitz(rng)
        return Sample(self.embed(X), X, {"toeplitz": X.to_json()})

    def samples(self, seed: int, count: int) -> list[Sample]:
        rng = random.Random(seed)
        return [self.draw(rng) for _ in range(count)]

    def sample_many(self, seed: int, count: int) -> list[ExactMatrix]:
        return [s.Q for s in self.samples(seed, count)]

    def random_parameters(self, rng: random.Random, reductive_only: bool = False) -> FreeParameterSet:
        forms, sh, cx = self.forms, self.forms.shape, self.complex_samples
        base = tuple(random_automorphism(forms.base(r), rng, cx) for r in range(sh.N))
        if reductive_only:
            return FreeParameterSet(base=base)
        below = {(r, s): tuple(random_matrix(rng, sh.mu[r], sh.mu[s], cx) for _ in range(sh.b(r, s)))
                 for r in range(sh.N) for s in range(r)}
        Z = {(r, j): random_parity_matrix(rng, sh.mu[r], (-1) ** (sh.alpha[r] - j + forms.c + 1), cx)
             for r in range(sh.N) for j in range(1, sh.alpha[r])}
        return FreeParameterSet(base=base, below=below, Z=Z)

    def random_toeplitz(self, rng: random.Random) -> BlockToeplitzMatrix:
        sh, cx = self.shape, self.complex_samples
        coeffs = {}
        for r in range(sh.N):
            for s in range(sh.N):
                blocks = [random_matrix(rng, sh.mu[r], sh.mu[s], cx) for _ in range(sh.b(r, s))]
                if r == s:
                    blocks[0] = random_nonsingular(rng, sh.mu[r], cx)
                coeffs[(r, s)] = tuple(blocks)
        return BlockToeplitzMatrix(sh, coeffs)

    def reductive_element(self, rng: random.Random) -> Sample:
        """Block-diagonal ``(+)_r (+)^{alpha_r} Q_r`` with ``Q_r^T B_r Q_r = B_r``."""
        if self.case != "nilpotent":
            raise DomainError("reductive accessor is defined for the nilpotent case")
        params = self.random_parameters(rng, reductive_only=True)
        Y = solve_structured_congruence(self.forms, params)
        return Sample(self.embed(Y), Y, {"free_parameters": params.to_json()})

    def unipotent_element(self, rng: random.Random) -> Sample:
        """Product of the diagonal and off-diagonal unipotent generators with random data."""
        if self.case != "nilpotent":
            raise DomainError("unipotent accessor is defined for the nilpotent case")
        gens = self.generator_list(rng)
        Y = BlockToeplitzMatrix.identity(self.shape)
        for g in gens:
            Y = Y @ g["toeplitz"]
        return Sample(self.embed(Y), Y, {"generators": [_generator_json(g, with_matrices=False) for g in gens]})

    def generator_list(self, rng: random.Random) -> list[dict]:
        cx = self.complex_samples
        sh = self.shape
        out: list[dict] = []
        if self.case == "nilpotent":
            forms = [self.forms.base(r) for r in range(sh.N)]
            c = self.forms.c
            for r in range(sh.N):
                if sh.alpha[r] < 2:
                    continue
                Z = [random_parity_matrix(rng, sh.mu[r], (-1) ** (sh.alpha[r] - j + c + 1), cx)
                     for j in range(1, sh.alpha[r])]
                out.append({"kind": "diagonal-unipotent", "r": r, "Z": Z,
                            "toeplitz": diagonal_unipotent(sh, c, forms, r, Z)})
            for p in range(sh.N):
                for t in range(p + 1, sh.N):
                    for k in range(sh.alpha[t]):
                        F = random_matrix(rng, sh.mu[t], sh.mu[p], cx)
                        out.append({"kind": "offdiagonal-unipotent", "p": p, "t": t, "k": k, "F": F,
                                    "toeplitz": offdiagonal_unipotent(sh, forms, p, t, k, F)})
            return out
        if self.case == "nonzero-pair":
            coeffs_id = _identity_coeffs(sh)
            diag = {k: tuple(v) for k, v in coeffs_id.items()}
            for r in range(sh.N):
                diag[(r, r)] = (random_nonsingular(rng, sh.mu[r], cx),) + diag[(r, r)][1:]
            out.append({"kind": "block-diagonal", "toeplitz": BlockToeplitzMatrix(sh, diag)})
            for r in range(sh.N):
                for s in range(sh.N):
                    for n in range(sh.b(r, s)):
                        if r == s and n == 0:
                            continue
                        coeffs = {k: list(v) for k, v in coeffs_id.items()}
                        coeffs[(r, s)][n] = random_matrix(rng, sh.mu[r], sh.mu[s], cx)
                        out.append({"kind": "elementary-unipotent", "r": r, "s": s, "n": n,
                                    "toeplitz": BlockToeplitzMatrix(sh, {k: tuple(v) for k, v in coeffs.items()})})
            return out
        raise DomainError("mixed models list generators per component")

    def generators(self, seed: int) -> list[dict]:
        """JSON-ready generators with their images ``Q`` in original coordinates."""
        rng = random.Random(seed)
        if self.case == "mixed":
            return [{"part": i + 1, "generators": m.generators(rng.randrange(2 ** 63))}
                    for i, m in enumerate(self.components)]
        return [dict(_generator_json(g), Q=self.embed(g["toeplitz"]).to_json()) for g in self.generator_list(rng)]

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "specs": [s.to_json() for s in self.specs],
            "dimension": self.dimension,
            "dimension_variants": dict(self.dimension_variants),
            "Psi": self.psi.to_json(),
        }


def _generator_json(g: dict, with_matrices: bool = True) -> dict:
    out = {}
    for key, v in g.items():
        if key == "toeplitz":
            if with_matrices:
                out[key] = v.to_json()
        elif key in ("r", "s", "p", "t"):
            out[key] = v + 1
        elif isinstance(v, ExactMatrix):
            out[key] = v.to_json()
        elif isinstance(v, list) and v and isinstance(v[0], ExactMatrix):
            out[key] = [m.to_json() for m in v]
        else:
            out[key] = v
    return out


def build_centralizer_nilpotent(spec: ShapeSpec, bundle: NormalFormBundle | None = None,
                                complex_samples: bool = True) -> CentralizerModel:
    if not spec.nilpotent:
        raise DomainError("nilpotent model needs a spec without lambda")
    bundle = bundle_for(spec) if bundle is None else bundle
    forms = AlternatingFormPair.block_diagonal(spec.c, spec.alpha, [base_form(spec, r) for r in range(spec.N)])
    variants = dimension_variants(spec)
    dim = forms.free_dimension()
    if dim != variants["theorem"]:
        raise ArithmeticError(f"parameter count {dim} differs from the closed form {variants['theorem']}")
    return CentralizerModel("nilpotent", (spec,), bundle, bundle.psi, bundle.psi.inverse(), dim, variants,
                            forms=forms, complex_samples=complex_samples)


def build_centralizer_nonzero(spec: ShapeSpec, bundle: NormalFormBundle | None = None,
                              complex_samples: bool = True) -> CentralizerModel:
    if spec.nilpotent:
        raise DomainError("nonzero-pair model needs a nonzero lambda")
    bundle = bundle_for(spec) if bundle is None else bundle
    variants = dimension_variants(spec)
    dim = CommutantShape(spec.alpha, spec.m).dimension()
    return CentralizerModel("nonzero-pair", (spec,), bundle, bundle.psi, bundle.psi.inverse(), dim, variants,
                            complex_samples=complex_samples)


def build_centralizer(spec: ShapeSpec, complex_samples: bool = True) -> CentralizerModel:
    if spec.nilpotent:
        return build_centralizer_nilpotent(spec, complex_samples=complex_samples)
    return build_centralizer_nonzero(spec, complex_samples=complex_samples)


def assemble_mixed(models: Sequence[CentralizerModel]) -> CentralizerModel:
    """Direct sum of one-eigenvalue models with pairwise distinct eigenvalue pairs."""
    models = tuple(models)
    if not models:
        raise DomainError("nothing to assemble")
    if len(models) == 1:
        return models[0]
    specs = tuple(s for m in models for s in m.specs)
    check_disjoint_spectra(specs)
    bundle = build_mixed_normal_form(specs)
    psi = direct_sum(*[m.psi for m in models])
    psi_inv = direct_sum(*[m.psi_inv for m in models])
    variants = {"sum": sum(m.dimension for m in models)}
    return CentralizerModel("mixed", specs, bundle, psi, psi_inv, variants["sum"], variants, components=models)
