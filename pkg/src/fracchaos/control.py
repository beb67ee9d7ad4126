"""Linear state feedback ``u = -K (x - x*)`` for the flagship system.

With ``K = diag(k1, k2, k3)`` the closed-loop Jacobian at the target is the
open-loop one with ``k_i`` subtracted on the diagonal. Its characteristic
cubic is expanded in closed form by ``closed_loop_cubic``; gain admissibility
is certified from the roots directly (every root with ``|arg| >= pi/2`` means
locally asymptotically stable for every order in (0, 1)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_PARAMS, ContractError, SystemModel, SystemParams, as_state, flagship_jacobian
from .stability import (
    CubicCoefficients,
    StabilityVerdict,
    cubic_discriminant,
    routh_hurwitz_case,
    routh_hurwitz_fractional,
    stable_for_all_orders,
)

TARGET_TOL = 1e-6


@dataclass(frozen=True)
class FeedbackLaw:
    gains: tuple[float, float, float]
    target: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gains", tuple(float(k) for k in self.gains))
        object.__setattr__(self, "target", as_state(self.target))
        if len(self.gains) != self.target.shape[0]:
            raise ContractError("one gain per state component is required")

    @classmethod
    def for_model(cls, model: SystemModel, gains, target) -> "FeedbackLaw":
        """Build a law after checking that ``target`` is an equilibrium of ``model``."""
        law = cls(gains, target)
        r = float(np.linalg.norm(model(law.target)))
        if r >= TARGET_TOL:
            raise ContractError(f"target is not an equilibrium (|f|={r:.3g})")
        return law

    def __call__(self, x) -> np.ndarray:
        return -np.asarray(self.gains) * (as_state(x) - self.target)


def closed_loop_jacobian(p: SystemParams, target, gains) -> np.ndarray:
    return flagship_jacobian(target, p) - np.diag(np.asarray(gains, dtype=float))


def _coefficients(p: SystemParams, target, k1, k2, k3):
    # broadcasts over array-valued gains
    a, b, c, d, h = p.as_tuple()
    x, y, z = as_state(target, 3)
    a1 = a + k1 + k2 - c + h + k3
    a2 = (
        d * x * (x - 1)
        + (a + k1) * (k2 - c + h + k3)
        + (k2 - c) * (h + k3)
        + (1 + b * z) * z
        - b * d * y**2
    )
    a3 = (
        (a + k1) * (d * x * (x - 1) + (k2 - c) * (h + k3))
        + (1 + b * z) * (d * y * (x - 1) + z * (h + k3))
        - b * y * (-d * x * z + d * y * (-c + k2))
    )
    return np.broadcast_arrays(a1, a2, a3)


def closed_loop_cubic(p: SystemParams, target, gains) -> CubicCoefficients:
    """Characteristic cubic ``det(lambda I - J_closed)`` in closed form."""
    k1, k2, k3 = (float(k) for k in gains)
    return CubicCoefficients(*(float(v) for v in _coefficients(p, target, k1, k2, k3)))


def _batched_roots(a1, a2, a3) -> np.ndarray:
    n = a1.shape[0]
    C = np.zeros((n, 3, 3))
    C[:, 0, 0], C[:, 0, 1], C[:, 0, 2] = -a1, -a2, -a3
    C[:, 1, 0] = 1.0
    C[:, 2, 1] = 1.0
    return np.linalg.eigvals(C)


def _all_order_mask(a1, a2, a3) -> np.ndarray:
    r = _batched_roots(a1, a2, a3)
    return np.all(r != 0, axis=1) & np.all(np.abs(np.angle(r)) >= np.pi / 2 - 1e-12, axis=1)


def blocking_conditions(c: CubicCoefficients) -> list[str]:
    """Which all-order stability conditions ``c`` violates (empty when stable)."""
    out = []
    a1, a2, a3 = c.as_tuple()
    if a1 <= 0:
        out.append("a1 <= 0")
    if a3 <= 0:
        out.append("a3 <= 0")
    if a1 * a2 - a3 < 0:
        out.append("a1*a2 - a3 < 0")
    if not stable_for_all_orders(c.roots()) and not out:
        out.append("min|arg(lambda)| < pi/2")
    return out


@dataclass
class GainInterval:
    lower: Optional[float]
    upper: Optional[float]
    lower_clipped: bool = False
    upper_clipped: bool = False
    sweep: tuple[float, float] = (-50.0, 50.0)
    rh_cases: list[str] = field(default_factory=list)
    diagnostic: list[dict] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return self.lower is None

    def __contains__(self, k: float) -> bool:
        if self.empty:
            return False
        lo_ok = k >= self.lower if self.lower_clipped else k > self.lower
        hi_ok = k <= self.upper if self.upper_clipped else k < self.upper
        return bool(lo_ok and hi_ok)

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "lower_clipped": self.lower_clipped,
            "upper_clipped": self.upper_clipped,
            "sweep": list(self.sweep),
            "rh_cases": list(self.rh_cases),
            "diagnostic": list(self.diagnostic),
            "empty": self.empty,
        }


def admissible_gain_interval(
    p: SystemParams = DEFAULT_PARAMS,
    target=None,
    k_range: tuple[float, float] = (-50.0, 50.0),
    resolution: float = 1e-3,
    tol: float = 1e-9,
) -> GainInterval:
    """Largest ``k1`` interval (``k2 = k3 = 0``) giving stability for every order in (0, 1).

    The sweep is a uniform grid at ``resolution``; each interior endpoint is
    then bisected to ``tol``. An endpoint that coincides with the sweep limit is
    flagged as clipped.
    """
    if target is None:
        from .analysis import flagship_equilibria

        target = flagship_equilibria(p)["Q2"].point
    lo, hi = k_range
    ks = np.linspace(lo, hi, int(round((hi - lo) / resolution)) + 1)
    ok = _all_order_mask(*_coefficients(p, target, ks, 0.0, 0.0))

    def stable(k: float) -> bool:
        return stable_for_all_orders(closed_loop_cubic(p, target, (k, 0, 0)).roots())

    if not ok.any():
        samples = np.linspace(lo, hi, 11)
        diag = [{"k1": float(k), "blocking": blocking_conditions(closed_loop_cubic(p, target, (k, 0, 0)))} for k in samples]
        return GainInterval(None, None, sweep=(lo, hi), diagnostic=diag)

    # longest run of consecutive admissible grid points
    padded = np.concatenate([[False], ok, [False]])
    edges = np.flatnonzero(np.diff(padded.astype(int)))
    starts, stops = edges[::2], edges[1::2] - 1
    best = int(np.argmax(stops - starts))
    i0, i1 = int(starts[best]), int(stops[best])

    def bisect(inside: float, outside: float) -> float:
        while abs(outside - inside) > tol:
            mid = 0.5 * (inside + outside)
            if stable(mid):
                inside = mid
            else:
                outside = mid
        return 0.5 * (inside + outside)

    lower_clipped = i0 == 0
    upper_clipped = i1 == len(ks) - 1
    lower = float(ks[0]) if lower_clipped else float(bisect(ks[i0], ks[i0 - 1]))
    upper = float(ks[-1]) if upper_clipped else float(bisect(ks[i1], ks[i1 + 1]))

    probe = np.linspace(ks[i0], ks[i1], 101)
    cases = []
    for k in probe:
        label, _ = routh_hurwitz_case(closed_loop_cubic(p, target, (k, 0, 0)), 0.99)
        if label not in cases:
            cases.append(label)
    return GainInterval(lower, upper, lower_clipped, upper_clipped, (lo, hi), cases)


@dataclass
class GainCertificate:
    gains: tuple[float, float, float]
    target: np.ndarray
    cubic: CubicCoefficients
    discriminant: float
    eigenvalues: tuple[complex, ...]
    stable_all_orders: bool
    unstable_from_order: float
    violated: list[str]
    alpha: Optional[float] = None
    at_alpha: Optional[StabilityVerdict] = None
    interval: Optional[GainInterval] = None

    @property
    def verdict(self) -> str:
        return "stable-for-all-alpha" if self.stable_all_orders else "unstable"

    @property
    def in_interval(self) -> Optional[bool]:
        if self.interval is None:
            return None
        return self.gains[0] in self.interval and self.gains[1] == 0 and self.gains[2] == 0

    def to_dict(self) -> dict:
        out = {
            "gains": list(self.gains),
            "target": [float(v) for v in self.target],
            "cubic": {"a1": self.cubic.a1, "a2": self.cubic.a2, "a3": self.cubic.a3},
            "discriminant": float(self.discriminant),
            "eigenvalues": [{"re": float(v.real), "im": float(v.imag)} for v in self.eigenvalues],
            "verdict": self.verdict,
            "unstable_from_order": float(self.unstable_from_order),
            "violated": list(self.violated),
        }
        if self.at_alpha is not None:
            out["alpha"] = self.alpha
            out["at_alpha"] = self.at_alpha.to_dict()
        if self.interval is not None:
            out["interval"] = self.interval.to_dict()
            out["in_interval"] = self.in_interval
        return out


def design_report(
    p: SystemParams,
    target,
    gains: Sequence[float],
    alpha: Optional[float] = None,
    interval: Optional[GainInterval] = None,
) -> GainCertificate:
    """Collect the closed-loop cubic and its stability verdicts into one record.

    ``unstable_from_order`` is the smallest order at which the closed loop is
    unstable (1 when it is stable for every order below 1).
    """
    target = as_state(target, 3)
    cubic = closed_loop_cubic(p, target, gains)
    eigs = np.linalg.eigvals(closed_loop_jacobian(p, target, gains))
    eigs = tuple(sorted((complex(v) for v in eigs), key=lambda v: (v.real, v.imag)))
    all_orders = stable_for_all_orders(eigs)
    crit = 1.0 if all_orders else min(1.0, 2 / np.pi * float(np.min(np.abs(np.angle(eigs)))))
    at = None
    if alpha is not None:
        at = routh_hurwitz_fractional(cubic, alpha)
    return GainCertificate(
        gains=tuple(float(k) for k in gains),
        target=target,
        cubic=cubic,
        discriminant=cubic_discriminant(cubic),
        eigenvalues=eigs,
        stable_all_orders=all_orders,
        unstable_from_order=crit,
        violated=blocking_conditions(cubic),
        alpha=alpha,
        at_alpha=at,
        interval=interval,
    )
