"""Normal forms, transition matrices and the conjugators that reduce a centralizer
problem to the block Toeplitz equation ``C = F X^T F B X``.

Nilpotent case (one eigenvalue 0, shape ``(c, alpha, m)``)::

    A = (+)_r (+)^{m_r} A_r,   A_r = J(0) (+) -J(0)^T  if c + alpha_r odd,  J(0) if even
    H = (+)_r (+)^{m_r} H_r,   H_r = [[0, I], [(-1)^{c+1} I, 0]]          or  Gamma
    U = (+)_r (+)^{m_r} U_r,   U_r = I (+) Gamma                             or  I

and ``Q = Psi^{-1} Y Psi`` with ``Psi = Phi^T Omega^T U`` turns ``AQ = QA``,
``Q^T H Q = H`` into ``B = F Y^T F B Y`` for a block Toeplitz ``Y``.

Nonzero case (eigenvalues ``+-lam``): ``A = (+) (J(lam) (+) -J(lam)^T)`` and
``Q = Psi^{-1} (X (+) (X^T)^{-1}) Psi`` for arbitrary nonsingular block Toeplitz ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .commutant import CommutantShape
from .exact import ONE, ExactMatrix, GaussianRational
from .shapes import DomainError, ParityError, ShapeSpec
from .structured import (
    block_shuffle_pairs,
    direct_sum,
    exchange,
    gamma,
    jordan_block,
    kron_identity,
    shuffle,
    sign_diag,
)

__all__ = [
    "NormalFormBundle",
    "FactorizationBundle",
    "nilpotent_block",
    "nilpotent_bundle",
    "nonzero_pair_bundle",
    "ed_decomposition",
    "target_form",
    "pair_factorization",
    "psi_conjugator_nilpotent",
    "psi_conjugator_nonzero",
    "build_mixed_normal_form",
    "bundle_for",
    "exp_nilpotent",
    "base_form",
]


class ConstructionError(RuntimeError):
    """An internal identity failed; indicates a sign-convention bug."""


@dataclass(frozen=True, eq=False)
class NormalFormBundle:
    A: ExactMatrix
    H: ExactMatrix
    R: ExactMatrix | None
    U: ExactMatrix
    J: ExactMatrix
    psi: ExactMatrix
    c: int
    parts: tuple[ShapeSpec, ...]
    h_lower_left_sign: tuple[int, ...] = ()
    omega_tilde: ExactMatrix | None = None

    @property
    def n(self) -> int:
        return self.A.rows

    def to_json(self) -> dict:
        out = {
            "c": self.c,
            "parts": [p.to_json() for p in self.parts],
            "A": self.A.to_json(),
            "H": self.H.to_json(),
            "R": None if self.R is None else self.R.to_json(),
            "U": self.U.to_json(),
            "J": self.J.to_json(),
            "Psi": self.psi.to_json(),
            "h_lower_left_sign": list(self.h_lower_left_sign),
        }
        if self.omega_tilde is not None:
            out["Omega_tilde"] = self.omega_tilde.to_json()
        return out


@dataclass(frozen=True, eq=False)
class FactorizationBundle:
    """Intermediate factorizations used to build the conjugator.

    Nilpotent case: ``E``, ``D`` with ``(U^{-1})^T H U^{-1} = E D``; ``Omega``,
    ``calD = Omega^T D Omega``, ``calF = Omega^T E Omega``; ``Phi`` and
    ``calB = Phi^T calD Phi`` with base forms ``B_r``.
    Nonzero case: ``D``, ``K`` with ``(U^{-1})^T H U^{-1} = D K``; ``B = B1 (+)
    (-1)^{c+1} B1^T`` and ``K_tilde`` after the pair shuffle; ``calB1``.
    """

    E: ExactMatrix | None = None
    D: ExactMatrix | None = None
    Omega: ExactMatrix | None = None
    calD: ExactMatrix | None = None
    calF: ExactMatrix | None = None
    Phi: ExactMatrix | None = None
    calB: ExactMatrix | None = None
    base_forms: tuple[ExactMatrix, ...] = field(default=())
    K: ExactMatrix | None = None
    B: ExactMatrix | None = None
    K_tilde: ExactMatrix | None = None
    B1: ExactMatrix | None = None
    calB1: ExactMatrix | None = None


def exp_nilpotent(A: ExactMatrix) -> ExactMatrix:
    """``exp(A)`` for nilpotent ``A`` as an exact finite sum."""
    n = A.rows
    term = ExactMatrix.identity(n)
    total = term
    for j in range(1, n + 1):
        term = (term @ A) * (ONE / j)
        if term.is_zero():
            return total
        total = total + term
    if not term.is_zero():
        raise DomainError("matrix is not nilpotent")
    return total


def _hr(alpha: int, sign: int) -> ExactMatrix:
    eye = ExactMatrix.identity(alpha)
    return ExactMatrix.from_blocks([[None, eye], [eye * sign, None]], [alpha, alpha], [alpha, alpha])


def _is_h_skew(A: ExactMatrix, H: ExactMatrix) -> bool:
    return (A.T @ H + H @ A).is_zero()


def nilpotent_block(c: int, size: int, paired: bool) -> tuple[ExactMatrix, ExactMatrix, ExactMatrix, ExactMatrix, int]:
    """One constituent ``(A_r, H_r, U_r, J_r, sign)`` of the nilpotent normal form.

    A single block ``J_size(0)`` exists only when ``c + size`` is even and a pair
    ``J (+) -J^T`` only when it is odd; anything else raises :class:`ParityError`.
    """
    if c not in (1, 2):
        raise DomainError("c must be 1 or 2")
    if paired != ((c + size) % 2 == 1):
        kind = "paired" if paired else "single"
        group = "orthogonal" if c == 1 else "symplectic"
        raise ParityError(f"a {kind} nilpotent block of size {size} does not occur in the {group} case")
    J = jordan_block(size)
    if not paired:
        return J, gamma(size), ExactMatrix.identity(size), J, 0
    A = direct_sum(J, -J.T)
    # Both lower-left signs make A H-skew; only one gives H^T = (-1)^{c+1} H.
    for sign in ((-1) ** (c + 1), (-1) ** c):
        H = _hr(size, sign)
        if _is_h_skew(A, H) and H.T == H * ((-1) ** (c + 1)):
            break
    else:  # pragma: no cover - both candidates are checked above
        raise ConstructionError("no admissible H_r sign")
    U = direct_sum(ExactMatrix.identity(size), gamma(size))
    return A, H, U, direct_sum(J, J), sign


def _require_nilpotent(spec: ShapeSpec):
    if not spec.nilpotent:
        raise DomainError("this construction is for the nilpotent case (no lambda)")


def _require_nonzero(spec: ShapeSpec):
    if spec.nilpotent:
        raise DomainError("this construction needs a nonzero eigenvalue lambda")


def nilpotent_bundle(spec: ShapeSpec) -> NormalFormBundle:
    _require_nilpotent(spec)
    As, Hs, Us, Js, signs = [], [], [], [], []
    for r, (a, m) in enumerate(zip(spec.alpha, spec.m)):
        A_r, H_r, U_r, J_r, sign = nilpotent_block(spec.c, a, spec.paired(r))
        As += [A_r] * m
        Hs += [H_r] * m
        Us += [U_r] * m
        Js += [J_r] * m
        signs.append(sign)
    A, H, U, J = direct_sum(*As), direct_sum(*Hs), direct_sum(*Us), direct_sum(*Js)
    if U @ A != J @ U:
        raise ConstructionError("A != U^{-1} J U")
    R = exp_nilpotent(A) * spec.epsilon
    return NormalFormBundle(A=A, H=H, R=R, U=U, J=J, psi=psi_conjugator_nilpotent(spec, U=U),
                            c=spec.c, parts=(spec,), h_lower_left_sign=tuple(signs))


def nonzero_pair_bundle(spec: ShapeSpec) -> NormalFormBundle:
    _require_nonzero(spec)
    lam, c = spec.lam, spec.c
    As, Hs, Us, Js = [], [], [], []
    for a, m in zip(spec.alpha, spec.m):
        Jp = jordan_block(a, lam)
        A_r = direct_sum(Jp, -Jp.T)
        H_r = _hr(a, (-1) ** (c + 1))
        U_r = direct_sum(ExactMatrix.identity(a), gamma(a))
        J_r = direct_sum(Jp, jordan_block(a, -lam))
        As += [A_r] * m
        Hs += [H_r] * m
        Us += [U_r] * m
        Js += [J_r] * m
    A, H, U, J = direct_sum(*As), direct_sum(*Hs), direct_sum(*Us), direct_sum(*Js)
    if U @ A != J @ U:
        raise ConstructionError("A != U^{-1} J U")
    return NormalFormBundle(A=A, H=H, R=None, U=U, J=J, psi=psi_conjugator_nonzero(spec, U=U), c=c,
                            parts=(spec,), h_lower_left_sign=tuple((-1) ** (c + 1) for _ in spec.alpha),
                            omega_tilde=pair_shuffle(spec))


def bundle_for(spec: ShapeSpec) -> NormalFormBundle:
    return nilpotent_bundle(spec) if spec.nilpotent else nonzero_pair_bundle(spec)


def _U_nilpotent(spec: ShapeSpec) -> ExactMatrix:
    blocks = []
    for r, (a, m) in enumerate(zip(spec.alpha, spec.m)):
        U_r = direct_sum(ExactMatrix.identity(a), gamma(a)) if spec.paired(r) else ExactMatrix.identity(a)
        blocks += [U_r] * m
    return direct_sum(*blocks)


def _U_pairs(spec: ShapeSpec) -> ExactMatrix:
    return direct_sum(*[direct_sum(ExactMatrix.identity(a), gamma(a))
                        for a, m in zip(spec.alpha, spec.m) for _ in range(m)])


def ed_decomposition(spec: ShapeSpec, U: ExactMatrix | None = None, H: ExactMatrix | None = None) -> FactorizationBundle:
    """``(U^{-1})^T H U^{-1} = E D`` with ``E`` block exchange and ``D`` block anti/diagonal."""
    _require_nilpotent(spec)
    if U is None or H is None:
        nb = nilpotent_bundle(spec)
        U, H = nb.U, nb.H
    Es, Ds = [], []
    for r, (a, m) in enumerate(zip(spec.alpha, spec.m)):
        F = sign_diag(a)
        if spec.paired(r):
            D_r = ExactMatrix.from_blocks([[None, -F], [F, None]], [a, a], [a, a])
        else:
            D_r = F * ((-1) ** a)
        Es += [exchange(a)] * spec.mu[r]
        Ds += [D_r] * m
    E, D = direct_sum(*Es), direct_sum(*Ds)
    Uinv = U.inverse()
    if Uinv.T @ H @ Uinv != E @ D:
        raise ConstructionError("(U^{-1})^T H U^{-1} != E D")
    return FactorizationBundle(E=E, D=D)


def base_form(spec: ShapeSpec, r: int) -> ExactMatrix:
    """The ``m_r x m_r`` (or ``2m_r``) form ``B_r`` fixed by the reductive part.

    Standard symplectic ``[[0, I], [-I, 0]]`` for paired blocks and
    ``(-1)^{alpha_r + 1} I`` for single ones (the sign produced by
    ``Phi^T Omega^T D Omega Phi``).
    """
    m, a = spec.m[r], spec.alpha[r]
    if spec.paired(r):
        eye = ExactMatrix.identity(m)
        return ExactMatrix.from_blocks([[None, eye], [-eye, None]], [m, m], [m, m])
    return ExactMatrix.scalar(m, (-1) ** (a + 1))


def target_form(spec: ShapeSpec, U: ExactMatrix | None = None, H: ExactMatrix | None = None) -> FactorizationBundle:
    """Shuffle ``E D`` into ``calF`` and block-diagonal alternating ``calB``."""
    fb = ed_decomposition(spec, U, H)
    shape = CommutantShape(spec.alpha, spec.mu)
    Omega = shape.omega()
    calD = Omega.T @ fb.D @ Omega
    calF = Omega.T @ fb.E @ Omega
    if calF != direct_sum(*[exchange(a, u) for a, u in zip(spec.alpha, spec.mu)]):
        raise ConstructionError("Omega^T E Omega is not the block exchange matrix")
    Phis = []
    for r, (a, m) in enumerate(zip(spec.alpha, spec.m)):
        Phi_r = shuffle(2, m) if spec.paired(r) else ExactMatrix.identity(m)
        Phis += [Phi_r] * a
    Phi = direct_sum(*Phis)
    if Phi.T @ calF @ Phi != calF:
        raise ConstructionError("Phi does not commute with calF")
    forms = tuple(base_form(spec, r) for r in range(spec.N))
    calB = direct_sum(*[forms[r] * ((-1) ** j) for r, a in enumerate(spec.alpha) for j in range(a)])
    if Phi.T @ calD @ Phi != calB:
        raise ConstructionError("Phi^T calD Phi does not have the expected alternating block form")
    return FactorizationBundle(E=fb.E, D=fb.D, Omega=Omega, calD=calD, calF=calF, Phi=Phi, calB=calB,
                               base_forms=forms)


def psi_conjugator_nilpotent(spec: ShapeSpec, U: ExactMatrix | None = None) -> ExactMatrix:
    """``Psi = Phi^T Omega^T U``."""
    _require_nilpotent(spec)
    U = _U_nilpotent(spec) if U is None else U
    Phis = []
    for r, (a, m) in enumerate(zip(spec.alpha, spec.m)):
        Phis += [shuffle(2, m) if spec.paired(r) else ExactMatrix.identity(m)] * a
    Omega = CommutantShape(spec.alpha, spec.mu).omega()
    return direct_sum(*Phis).T @ Omega.T @ U


def pair_shuffle(spec: ShapeSpec) -> ExactMatrix:
    """``Omega_tilde = Omega_tilde_1 Omega_tilde_2``: groups all ``+lam`` blocks before ``-lam`` ones."""
    om1 = direct_sum(*[kron_identity(shuffle(2, m), a) for a, m in zip(spec.alpha, spec.m)])
    om2 = block_shuffle_pairs([a * m for a, m in zip(spec.alpha, spec.m)])
    return om1 @ om2


def pair_factorization(spec: ShapeSpec, U: ExactMatrix | None = None, H: ExactMatrix | None = None) -> FactorizationBundle:
    _require_nonzero(spec)
    c = spec.c
    if U is None or H is None:
        U = _U_pairs(spec)
        H = direct_sum(*[_hr(a, (-1) ** (c + 1)) for a, m in zip(spec.alpha, spec.m) for _ in range(m)])
    Ds, Ks, B1s = [], [], []
    for a, m in zip(spec.alpha, spec.m):
        G = gamma(a)
        eye = ExactMatrix.identity(a)
        Ds += [direct_sum(G * ((-1) ** (a - 1)), G.T * ((-1) ** (c + a)))] * m
        Ks += [ExactMatrix.from_blocks([[None, eye], [eye, None]], [a, a], [a, a])] * m
        B1s += [G * ((-1) ** (a - 1))] * m
    D, K, B1 = direct_sum(*Ds), direct_sum(*Ks), direct_sum(*B1s)
    Uinv = U.inverse()
    if Uinv.T @ H @ Uinv != D @ K:
        raise ConstructionError("(U^{-1})^T H U^{-1} != D K")
    om = pair_shuffle(spec)
    B = om.T @ D @ om
    K_tilde = om.T @ K @ om
    half = B1.rows
    eye = ExactMatrix.identity(half)
    if B != direct_sum(B1, B1.T * ((-1) ** (c + 1))):
        raise ConstructionError("Omega_tilde^T D Omega_tilde != B1 (+) (-1)^{c+1} B1^T")
    if K_tilde != ExactMatrix.from_blocks([[None, eye], [eye, None]], [half, half], [half, half]):
        raise ConstructionError("Omega_tilde^T K Omega_tilde is not the swap")
    Omega = CommutantShape(spec.alpha, spec.m).omega()
    calB1 = Omega.T @ B1 @ Omega
    expected = direct_sum(*[kron_identity(gamma(a), m) * ((-1) ** (a - 1)) for a, m in zip(spec.alpha, spec.m)])
    if calB1 != expected:
        raise ConstructionError("Omega^T B1 Omega is not the block Gamma form")
    return FactorizationBundle(D=D, K=K, B=B, K_tilde=K_tilde, B1=B1, calB1=calB1, Omega=Omega)


def psi_conjugator_nonzero(spec: ShapeSpec, U: ExactMatrix | None = None) -> ExactMatrix:
    """``Psi = (I (+) calB1) (Omega^T (+) Omega^T) Omega_tilde^T U``."""
    _require_nonzero(spec)
    U = _U_pairs(spec) if U is None else U
    Omega = CommutantShape(spec.alpha, spec.m).omega()
    calB1 = direct_sum(*[kron_identity(gamma(a), m) * ((-1) ** (a - 1)) for a, m in zip(spec.alpha, spec.m)])
    left = direct_sum(ExactMatrix.identity(calB1.rows), calB1)
    return left @ direct_sum(Omega.T, Omega.T) @ pair_shuffle(spec).T @ U


def _eigen_pair(spec: ShapeSpec) -> frozenset:
    if spec.nilpotent:
        return frozenset([GaussianRational(0)])
    return frozenset([spec.lam, -spec.lam])


def check_disjoint_spectra(parts: Sequence[ShapeSpec]) -> None:
    seen: set = set()
    for p in parts:
        pair = _eigen_pair(p)
        if pair & seen:
            raise DomainError(f"eigenvalue pair {sorted(map(str, pair))} of part {p} repeats an earlier part")
        seen |= pair
    if len({p.c for p in parts}) > 1:
        raise DomainError("all parts must share the same c")


def build_mixed_normal_form(parts: Sequence[ShapeSpec]) -> NormalFormBundle:
    """Direct sum of one-eigenvalue bundles with pairwise distinct ``+-lam``."""
    parts = tuple(parts)
    if not parts:
        raise DomainError("at least one part is required")
    check_disjoint_spectra(parts)
    bundles = [bundle_for(p) for p in parts]
    if len(bundles) == 1:
        return bundles[0]
    R = None
    if all(b.R is not None for b in bundles):
        R = direct_sum(*[b.R for b in bundles])
    return NormalFormBundle(
        A=direct_sum(*[b.A for b in bundles]),
        H=direct_sum(*[b.H for b in bundles]),
        R=R,
        U=direct_sum(*[b.U for b in bundles]),
        J=direct_sum(*[b.J for b in bundles]),
        psi=direct_sum(*[b.psi for b in bundles]),
        c=parts[0].c,
        parts=parts,
        h_lower_left_sign=tuple(s for b in bundles for s in b.h_lower_left_sign),
    )
