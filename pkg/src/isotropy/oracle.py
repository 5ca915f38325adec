"""Brute-force verification, independent of the centralizer engine.

Only exact-core code is used here; a model under test is accessed by duck typing
(``sample_many(seed, count)`` and ``dimension``), never imported.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import ResourceLimitError
from .exact import ZERO, ExactMatrix, GaussianRational, scalar_to_json, sparse_rank

__all__ = [
    "is_H_automorphism",
    "is_H_skew",
    "commutes",
    "lie_algebra_dimension",
    "classical_dimension",
    "CheckResult",
    "VerificationReport",
    "verify_model",
    "corrupt_matrix",
    "max_size_from_env",
]

DEFAULT_MAX_N = 24
ENV_MAX_N = "ISOTROPY_MAX_N"


def max_size_from_env() -> int:
    raw = os.environ.get(ENV_MAX_N)
    if raw is None:
        return DEFAULT_MAX_N
    try:
        value = int(raw)
    except ValueError:
        raise ResourceLimitError(f"{ENV_MAX_N} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ResourceLimitError(f"{ENV_MAX_N} must be positive")
    return value


def _square_pair(X: ExactMatrix, Y: ExactMatrix):
    if not X.is_square or X.shape != Y.shape:
        raise ValueError(f"size mismatch: {X.shape} vs {Y.shape}")


def automorphism_residual(Q: ExactMatrix, H: ExactMatrix) -> ExactMatrix:
    _square_pair(Q, H)
    return Q.T @ H @ Q - H


def skew_residual(A: ExactMatrix, H: ExactMatrix) -> ExactMatrix:
    _square_pair(A, H)
    return A.T @ H + H @ A


def commutator(Q: ExactMatrix, A: ExactMatrix) -> ExactMatrix:
    _square_pair(Q, A)
    return A @ Q - Q @ A


def is_H_automorphism(Q: ExactMatrix, H: ExactMatrix) -> bool:
    """``Q^T H Q == H`` exactly."""
    return automorphism_residual(Q, H).is_zero()


def is_H_skew(A: ExactMatrix, H: ExactMatrix) -> bool:
    """``A^T H + H A == 0`` exactly."""
    return skew_residual(A, H).is_zero()


def commutes(Q: ExactMatrix, A: ExactMatrix) -> bool:
    return commutator(Q, A).is_zero()


def lie_algebra_dimension(A: ExactMatrix, H: ExactMatrix, max_n: int | None = None) -> int:
    """Dimension of ``{X : XA = AX, X^T H + H X = 0}`` by exact elimination.

    Unknown ``X[i][j]`` is variable ``i*n + j``; both linear systems are stacked
    and the nullity of the ``2n^2 x n^2`` coefficient matrix is returned.
    """
    _square_pair(A, H)
    n = A.rows
    limit = max_size_from_env() if max_n is None else max_n
    if n > limit:
        raise ResourceLimitError(f"oracle size n={n} exceeds limit {limit}")
    a_rows = A._nonzeros()
    a_cols = A.T._nonzeros()
    h_rows = H._nonzeros()
    eqs: list[dict[int, GaussianRational]] = []

    def add(eq, idx, v):
        s = eq.get(idx, ZERO) + v
        if s:
            eq[idx] = s
        else:
            eq.pop(idx, None)

    for i in range(n):
        for j in range(n):
            # (XA - AX)[i][j] = sum_k X[i][k] A[k][j] - A[i][k] X[k][j]
            eq: dict[int, GaussianRational] = {}
            for k, v in a_cols[j]:
                add(eq, i * n + k, v)
            for k, v in a_rows[i]:
                add(eq, k * n + j, -v)
            if eq:
                eqs.append(eq)
            # (X^T H + H X)[i][j] = sum_k X[k][i] H[k][j] + H[i][k] X[k][j]
            eq = {}
            for k in range(n):
                v = H[k, j]
                if v:
                    add(eq, k * n + i, v)
            for k, v in h_rows[i]:
                add(eq, k * n + j, v)
            if eq:
                eqs.append(eq)
    return n * n - sparse_rank(eqs)


def classical_dimension(n: int, symmetric: bool) -> int:
    """``dim O_n = n(n-1)/2`` and ``dim Sp_n = n(n+1)/2``."""
    return n * (n - 1) // 2 if symmetric else n * (n + 1) // 2


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual_zero: bool
    offending: tuple[int, int, GaussianRational] | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "passed": self.passed, "residual_zero": self.residual_zero}
        if self.offending is not None:
            i, j, v = self.offending
            out["first_offending_entry"] = {"row": i, "col": j, "value": scalar_to_json(v)}
        if self.detail:
            out["detail"] = self.detail
        return out


def _residual_check(name: str, residual: ExactMatrix, detail: str = "") -> CheckResult:
    hit = residual.first_nonzero()
    return CheckResult(name, hit is None, hit is None, hit, detail)


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)
    dimensions: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> CheckResult | None:
        return next((c for c in self.checks if not c.passed), None)

    def to_json(self) -> dict:
        failure = self.first_failure()
        return {
            "passed": self.passed,
            "n_checks": len(self.checks),
            "n_failed": sum(not c.passed for c in self.checks),
            "first_failure": None if failure is None else failure.to_json(),
            "dimensions": self.dimensions,
            "checks": [c.to_json() for c in self.checks],
        }

    def summary(self) -> str:
        lines = [f"{'PASS' if self.passed else 'FAIL'}: {len(self.checks)} checks, "
                 f"{sum(not c.passed for c in self.checks)} failed"]
        if self.dimensions:
            lines.append("dimensions: " + ", ".join(f"{k}={v}" for k, v in self.dimensions.items()))
        failure = self.first_failure()
        if failure is not None:
            where = ""
            if failure.offending is not None:
                i, j, v = failure.offending
                where = f" first nonzero residual at ({i},{j}) = {v}"
            lines.append(f"first failure: {failure.name}{where}")
        return "\n".join(lines)


def corrupt_matrix(Q: ExactMatrix, i: int = 0, j: int = 0, delta=1) -> ExactMatrix:
    """``Q`` with ``delta`` added to entry ``(i, j)``; used as a falsifiability probe."""
    return Q + ExactMatrix.from_entries(Q.rows, Q.cols, {(i, j): delta})


def membership_checks(label: str, Q: ExactMatrix, A: ExactMatrix, H: ExactMatrix,
                      R: ExactMatrix | None) -> list[CheckResult]:
    out = [
        _residual_check(f"{label}: Q^T H Q = H", automorphism_residual(Q, H)),
        _residual_check(f"{label}: A Q = Q A", commutator(Q, A)),
    ]
    if R is not None:
        out.append(_residual_check(f"{label}: R Q = Q R", commutator(Q, R)))
    return out


def verify_model(model, bundle, samples: int = 50, seed: int = 0, corrupt: bool = False,
                 check_dimension: bool = True, closure_pairs: int | None = None) -> VerificationReport:
    """Membership, closure and dimension checks for a model's samples.

    ``model`` needs ``sample_many(seed, count) -> list[ExactMatrix]`` and an integer
    ``dimension`` (optionally ``dimension_variants``); ``bundle`` supplies ``A``, ``H``
    and ``R`` (``R`` may be ``None``).  With ``corrupt=True`` the first sample has one
    entry perturbed before checking, which must make the report fail.
    """
    A, H, R = bundle.A, bundle.H, bundle.R
    report = VerificationReport()
    drawn: list[ExactMatrix] = list(model.sample_many(seed, samples))
    if corrupt and drawn:
        drawn[0] = corrupt_matrix(drawn[0])
    for idx, Q in enumerate(drawn):
        report.checks.extend(membership_checks(f"sample {idx}", Q, A, H, R))
    pairs = len(drawn) - 1 if closure_pairs is None else min(closure_pairs, len(drawn) - 1)
    for idx in range(max(pairs, 0)):
        P = drawn[idx] @ drawn[idx + 1]
        report.checks.extend(membership_checks(f"product {idx}*{idx + 1}", P, A, H, R))
    if drawn:
        try:
            inv = drawn[-1].inverse()
        except ArithmeticError:
            report.checks.append(CheckResult(f"inverse of sample {len(drawn) - 1}", False, False,
                                             detail="sample is singular"))
        else:
            report.checks.extend(membership_checks(f"inverse of sample {len(drawn) - 1}", inv, A, H, R))
    if check_dimension:
        oracle = lie_algebra_dimension(A, H)
        dims: dict[str, Any] = {"oracle": oracle, "model": model.dimension}
        variants = getattr(model, "dimension_variants", None)
        if variants:
            dims["formula_variants"] = dict(variants)
        report.dimensions = dims
        report.checks.append(CheckResult("dimension: model = oracle", model.dimension == oracle,
                                         model.dimension == oracle,
                                         detail=f"model {model.dimension}, oracle {oracle}"))
    return report
