"""Minimal commensurate order for a chaotic attractor to persist.

An attractor whose scrolls wind around index-2 saddles needs every such
saddle to stay unstable. At order ``alpha`` an equilibrium is unstable iff
some eigenvalue has ``|arg(lambda)| <= alpha*pi/2``, which gives the lower bound
``alpha >= (2/pi) * min |arg(lambda)|``. For an unstable complex eigenvalue this
is ``(2/pi) * arctan(|Im lambda| / Re lambda)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import EquilibriumReport, SaddleIndex


def chaos_order_threshold(eigs: Sequence[complex]) -> float:
    """Smallest order at which an equilibrium with eigenvalues ``eigs`` is unstable.

    Returns 0 when a real eigenvalue is non-negative (unstable at every order)
    and 1 when all eigenvalues lie in the open left half plane.
    """
    eigs = np.asarray(eigs, dtype=complex)
    if np.any(eigs == 0):
        return 0.0
    unstable = eigs[eigs.real > 0]
    if unstable.size == 0:
        return 1.0
    return float(np.min(2 / np.pi * np.arctan(np.abs(unstable.imag) / unstable.real)))


@dataclass
class ChaosThresholdReport:
    per_equilibrium: dict[str, float]
    attaining: dict[str, complex]
    system_threshold: float
    anchors: list[str]
    diagnostic: str = ""

    def to_dict(self) -> dict:
        return {
            "per_equilibrium": {k: float(v) for k, v in self.per_equilibrium.items()},
            "attaining_eigenvalue": {
                k: {"re": float(v.real), "im": float(v.imag)} for k, v in self.attaining.items()
            },
            "system_threshold": float(self.system_threshold),
            "anchors": list(self.anchors),
            "diagnostic": self.diagnostic,
        }


def _attaining(eigs) -> complex:
    eigs = np.asarray(eigs, dtype=complex)
    i = int(np.argmin(np.abs(np.angle(eigs))))
    return complex(eigs[i])


def system_chaos_threshold(reports: Sequence[EquilibriumReport]) -> ChaosThresholdReport:
    """Maximum of the per-point thresholds over the index-2 saddles."""
    if not reports:
        raise ValueError("no equilibria supplied")
    per = {r.label: chaos_order_threshold(r.eigenvalues) for r in reports}
    att = {r.label: _attaining(r.eigenvalues) for r in reports}
    anchors = [r.label for r in reports if r.saddle_index is SaddleIndex.INDEX_2]
    if anchors:
        return ChaosThresholdReport(per, att, max(per[k] for k in anchors), anchors)
    return ChaosThresholdReport(per, att, 1.0, [], diagnostic="no index-2 saddle; threshold is vacuous")
