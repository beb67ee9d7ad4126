"""Local stability tests for commensurate and incommensurate fractional systems.

* ``matignon_commensurate``: a linear system ``D^alpha x = A x`` is
  asymptotically stable iff every eigenvalue of ``A`` satisfies
  ``|arg(lambda)| > alpha*pi/2``.
* ``incommensurate_stable``: for rational orders ``q_i = n_i/d_i`` with
  ``M = lcm(d_i)``, all roots of ``det(diag(lambda^(M q_i)) - A)`` must satisfy
  ``|arg(lambda)| > pi/(2M)``.
* ``routh_hurwitz_fractional``: coefficient-based case analysis for cubic
  characteristic polynomials.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .core import ContractError, OrderVector

ARG_TOL = 1e-12
EQ_TOL = 1e-9
MAX_DEGREE = 2000


class Verdict(str, enum.Enum):
    ASYMPTOTICALLY_STABLE = "asymptotically-stable"
    STABLE = "stable"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"

    @property
    def definite(self) -> bool:
        return self is not Verdict.INCONCLUSIVE


@dataclass(frozen=True)
class CubicCoefficients:
    """Monic cubic ``lambda^3 + a1 lambda^2 + a2 lambda + a3``."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.a1, self.a2, self.a3)):
            raise ContractError("cubic coefficients must be finite")

    @classmethod
    def from_matrix(cls, J) -> "CubicCoefficients":
        c = np.poly(np.asarray(J, dtype=float))
        return cls(float(c[1].real), float(c[2].real), float(c[3].real))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a1, self.a2, self.a3)

    def companion(self) -> np.ndarray:
        return np.array([
            [-self.a1, -self.a2, -self.a3],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
        ])

    def roots(self) -> np.ndarray:
        return np.linalg.eigvals(self.companion())

    def __call__(self, lam):
        return ((lam + self.a1) * lam + self.a2) * lam + self.a3


@dataclass(frozen=True)
class StabilityVerdict:
    verdict: Verdict
    min_arg: float
    witness: complex
    roots: tuple[complex, ...]
    criterion: str
    discriminant: Optional[float] = None
    rh_case: Optional[str] = None
    case_verdict: Optional[Verdict] = None

    @property
    def is_asymptotically_stable(self) -> bool:
        return self.verdict is Verdict.ASYMPTOTICALLY_STABLE

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "min_arg": float(self.min_arg),
            "witness": {"re": float(self.witness.real), "im": float(self.witness.imag)},
            "criterion": self.criterion,
        }
        if self.discriminant is not None:
            out["discriminant"] = float(self.discriminant)
        if self.rh_case is not None:
            out["rh_case"] = self.rh_case
            out["case_verdict"] = self.case_verdict.value
        return out


def _abs_args(roots) -> np.ndarray:
    return np.abs(np.angle(np.asarray(roots, dtype=complex)))


def _witness(roots):
    args = _abs_args(roots)
    i = int(np.argmin(args))
    return float(args[i]), complex(roots[i])


def _geometric_multiplicity(A: np.ndarray, lam: complex) -> int:
    n = A.shape[0]
    M = A.astype(complex) - lam * np.eye(n)
    s = np.linalg.svd(M, compute_uv=False)
    tol = max(1.0, float(np.abs(A).max())) * 1e-8
    return int(np.sum(s <= tol))


def _semisimple(critical: np.ndarray, eigs: np.ndarray, A) -> bool:
    scale = max(1.0, float(np.max(np.abs(eigs))))
    for lam in critical:
        alg = int(np.sum(np.abs(eigs - lam) <= 1e-8 * scale))
        if A is None:
            if alg > 1:
                return False
        elif _geometric_multiplicity(np.asarray(A, dtype=float), lam) != alg:
            return False
    return True


def matignon_from_eigenvalues(eigs: Sequence[complex], alpha: float, A=None) -> StabilityVerdict:
    """Apply the sector test to known eigenvalues.

    Eigenvalues exactly on the sector boundary give ``stable`` when they are
    semisimple in ``A`` (no Jordan block); without ``A`` they must be distinct.
    """
    if not (0 < alpha <= 1):
        raise ContractError(f"alpha={alpha} outside (0, 1]")
    eigs = np.asarray(eigs, dtype=complex)
    min_arg, wit = _witness(eigs)
    bound = alpha * np.pi / 2
    args = _abs_args(eigs)
    if min_arg > bound + ARG_TOL:
        v = Verdict.ASYMPTOTICALLY_STABLE
    elif min_arg < bound - ARG_TOL or abs(wit) == 0.0:
        v = Verdict.UNSTABLE
    else:
        critical = eigs[np.abs(args - bound) <= ARG_TOL]
        v = Verdict.STABLE if _semisimple(critical, eigs, A) else Verdict.UNSTABLE
    return StabilityVerdict(v, min_arg, wit, tuple(complex(e) for e in eigs), "matignon")


def matignon_commensurate(A, alpha: float) -> StabilityVerdict:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise ContractError("matrix must be square")
    try:
        eigs = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("eigenvalue solver failed") from exc
    return matignon_from_eigenvalues(eigs, alpha, A)


def det_polynomial(A, exponents: Sequence[int]) -> np.ndarray:
    """Coefficients (lowest degree first) of ``det(diag(lambda^e_i) - A)``.

    Expanded by the Leibniz formula over permutations, exact in the entries
    of ``A`` up to floating-point rounding.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    if len(exponents) != n:
        raise ContractError("one exponent per row is required")
    entries = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                e = np.zeros(exponents[i] + 1)
                e[exponents[i]] = 1.0
                e[0] -= A[i, i]
                entries[i][j] = e
            else:
                entries[i][j] = np.array([-A[i, j]])
    total = np.zeros(1)
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        term = np.ones(1)
        for i, j in enumerate(perm):
            term = P.polymul(term, entries[i][j])
        total = P.polyadd(total, sign * term)
    return P.polytrim(total, 0.0) if np.any(total) else total


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def polynomial_roots(coeffs_low_first: np.ndarray) -> np.ndarray:
    """Roots as eigenvalues of the companion matrix."""
    c = np.trim_zeros(np.asarray(coeffs_low_first, dtype=float), "b")
    if c.size <= 1:
        return np.array([], dtype=complex)
    try:
        return np.roots(c[::-1])
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("root finder failed") from exc


def incommensurate_stable(A, q: OrderVector) -> StabilityVerdict:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not isinstance(q, OrderVector):
        q = OrderVector(q)
    if len(q) != A.shape[0]:
        raise ContractError("order vector length must match the matrix size")
    M = q.lcm
    exps = [int(qi * M) for qi in q.orders]
    if sum(exps) > MAX_DEGREE:
        raise ContractError(f"lcm of order denominators ({M}) gives a polynomial of degree {sum(exps)}")
    roots = polynomial_roots(det_polynomial(A, exps))
    min_arg, wit = _witness(roots)
    bound = np.pi / (2 * M)
    if min_arg > bound + ARG_TOL:
        v = Verdict.ASYMPTOTICALLY_STABLE
    elif min_arg < bound - ARG_TOL:
        v = Verdict.UNSTABLE
    else:
        v = Verdict.INCONCLUSIVE
    return StabilityVerdict(v, min_arg, wit, tuple(complex(r) for r in roots), f"incommensurate(M={M})")


def cubic_discriminant(c: CubicCoefficients) -> float:
    a1, a2, a3 = c.as_tuple()
    return 18 * a1 * a2 * a3 + (a1 * a2) ** 2 - 4 * a3 * a1**3 - 4 * a2**3 - 27 * a3**2


def routh_hurwitz_case(c: CubicCoefficients, alpha: float) -> tuple[str, Verdict]:
    """Which fractional Routh-Hurwitz case applies, and what it implies.

    Near-ties (``|D|`` or ``|a1 a2 - a3|`` below ``EQ_TOL``) outside the
    equality case are reported as inconclusive.
    """
    a1, a2, a3 = c.as_tuple()
    D = cubic_discriminant(c)
    hurwitz = a1 * a2 - a3
    if a3 <= 0:
        return "iv", Verdict.UNSTABLE
    if abs(D) <= EQ_TOL:
        return "D=0", Verdict.INCONCLUSIVE
    if D > 0:
        if abs(hurwitz) <= EQ_TOL:
            return "i", Verdict.INCONCLUSIVE
        ok = a1 > 0 and hurwitz > 0
        return "i", Verdict.ASYMPTOTICALLY_STABLE if ok else Verdict.UNSTABLE
    if a1 > 0 and a2 > 0 and abs(hurwitz) <= EQ_TOL:
        if alpha < 1:
            return "iii", Verdict.ASYMPTOTICALLY_STABLE
        return "v", Verdict.STABLE
    if a1 >= 0 and a2 >= 0:
        if alpha < 2 / 3:
            return "ii", Verdict.ASYMPTOTICALLY_STABLE
        return "ii", Verdict.INCONCLUSIVE
    if a1 < 0 and a2 < 0 and alpha > 2 / 3:
        return "ii-unstable", Verdict.UNSTABLE
    return "uncovered", Verdict.INCONCLUSIVE


def routh_hurwitz_fractional(c: CubicCoefficients, alpha: float) -> StabilityVerdict:
    """Routh-Hurwitz case label with the sector test as the verdict.

    The returned ``verdict`` is always the sector test on the cubic's roots;
    ``rh_case``/``case_verdict`` carry the coefficient-based conclusion.
    """
    if not (0 < alpha <= 1):
        raise ContractError(f"alpha={alpha} outside (0, 1]")
    case, case_v = routh_hurwitz_case(c, alpha)
    base = matignon_from_eigenvalues(c.roots(), alpha, c.companion())
    return StabilityVerdict(
        verdict=base.verdict,
        min_arg=base.min_arg,
        witness=base.witness,
        roots=base.roots,
        criterion="routh-hurwitz",
        discriminant=cubic_discriminant(c),
        rh_case=case,
        case_verdict=case_v,
    )


def stable_for_all_orders(eigs: Sequence[complex]) -> bool:
    """True when the sector test passes for every ``alpha`` in (0, 1)."""
    eigs = np.asarray(eigs, dtype=complex)
    return bool(np.all(eigs != 0) and np.all(_abs_args(eigs) >= np.pi / 2 - ARG_TOL))
