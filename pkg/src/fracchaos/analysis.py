"""Equilibria, Jacobian eigenvalues and saddle classification."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_PARAMS, SystemModel, SystemParams, as_state

RESIDUAL_TOL = 1e-9
CONJ_TOL = 1e-9


class SaddleIndex(str, enum.Enum):
    NOT_SADDLE = "not-saddle"
    INDEX_1 = "index-1"
    INDEX_2 = "index-2"


class NewtonError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EquilibriumReport:
    label: str
    point: np.ndarray
    eigenvalues: tuple[complex, ...]
    saddle_index: SaddleIndex
    residual: float
    closed_form: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "point": [float(v) for v in self.point],
            "eigenvalues": [{"re": float(v.real), "im": float(v.imag)} for v in self.eigenvalues],
            "saddle_index": self.saddle_index.value,
            "residual": float(self.residual),
            "closed_form": self.closed_form,
        }


@dataclass
class EquilibriumSet:
    """Real equilibria plus the formal closed-form points that were not real."""

    reports: list[EquilibriumReport]
    degenerate: list[dict] = field(default_factory=list)

    def __iter__(self):
        return iter(self.reports)

    def __len__(self):
        return len(self.reports)

    def __getitem__(self, key):
        if isinstance(key, str):
            for r in self.reports:
                if r.label == key:
                    return r
            raise KeyError(key)
        return self.reports[key]

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.reports]


def newton_refine(model: SystemModel, seed, tol: float = RESIDUAL_TOL, maxiter: int = 50) -> np.ndarray:
    """Refine ``seed`` to a root of ``model`` by Newton's method.

    Returns the point once ``||f|| < tol`` and the last correction is tiny.
    """
    x = as_state(seed, model.n)
    for _ in range(maxiter):
        fx = model(x)
        if not np.all(np.isfinite(fx)):
            break
        try:
            dx = np.linalg.solve(model.jac(x), -fx)
        except np.linalg.LinAlgError:
            break
        x = x + dx
        if not np.all(np.isfinite(x)):
            break
        if np.linalg.norm(dx) <= 1e-14 * max(1.0, np.linalg.norm(x)) and np.linalg.norm(model(x)) < tol:
            return x
        if np.linalg.norm(model(x)) < tol * 1e-3:
            return x
    if np.all(np.isfinite(x)) and np.linalg.norm(model(x)) < tol:
        return x
    raise NewtonError(f"Newton did not converge from seed {np.asarray(seed).tolist()}")


def eigenvalues_at(model: SystemModel, point) -> list[complex]:
    """Eigenvalues of the Jacobian at ``point``, ordered by real then imaginary part."""
    J = model.jac(point)
    try:
        ev = np.linalg.eigvals(J)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("eigenvalue solver failed") from exc
    ev = _symmetrize_conjugates(np.asarray(ev, dtype=complex))
    return sorted((complex(v) for v in ev), key=lambda v: (round(v.real, 12), v.imag))


def _symmetrize_conjugates(ev: np.ndarray) -> np.ndarray:
    # LAPACK already returns exact pairs for real input; this only cleans
    # the near-zero imaginary parts of real eigenvalues.
    scale = max(1.0, float(np.max(np.abs(ev)))) if ev.size else 1.0
    out = ev.copy()
    mask = np.abs(out.imag) <= CONJ_TOL * scale
    out[mask] = out[mask].real
    return out


def classify_saddle(eigs: Sequence[complex], tol: float = CONJ_TOL) -> SaddleIndex:
    eigs = [complex(v) for v in eigs]
    if len(eigs) != 3:
        return SaddleIndex.NOT_SADDLE
    scale = max(1.0, max(abs(v) for v in eigs))
    reals = [v for v in eigs if abs(v.imag) <= tol * scale]
    cplx = [v for v in eigs if abs(v.imag) > tol * scale]
    if len(reals) != 1 or len(cplx) != 2:
        return SaddleIndex.NOT_SADDLE
    u, w = cplx
    if abs(u - w.conjugate()) > tol * scale:
        return SaddleIndex.NOT_SADDLE
    a = reals[0].real
    b = u.real
    if a * b >= 0:
        return SaddleIndex.NOT_SADDLE
    if a < 0 < b:
        return SaddleIndex.INDEX_2
    return SaddleIndex.INDEX_1


def _report(model: SystemModel, label: str, point, closed_form: str = "") -> EquilibriumReport:
    point = np.asarray(point, dtype=float)
    eigs = eigenvalues_at(model, point)
    return EquilibriumReport(
        label=label,
        point=point,
        eigenvalues=tuple(eigs),
        saddle_index=classify_saddle(eigs),
        residual=float(np.linalg.norm(model(point))),
        closed_form=closed_form,
    )


def closed_form_seeds(p: SystemParams = DEFAULT_PARAMS) -> dict:
    """Closed-form equilibrium candidates of the flagship system.

    Q4 and Q5 are returned in two readings: ``literal`` takes the square root
    term of the y-coordinate from Lambda and that of z from Gamma; ``consistent``
    uses Gamma in both. Entries with a negative radicand are ``None``.
    """
    a, b, c, d, h = p.as_tuple()
    disc = d * d + 4 * c * h * d
    sq = np.sqrt(disc)
    lam = 2 * a * b / h * (d + 2 * c * h + sq)
    gam = 2 * a * b / h * (d + 2 * c * h - sq)

    def root(v):
        return np.sqrt(1 + v) if 1 + v >= 0 else None

    rl, rg = root(lam), root(gam)
    seeds: dict = {"Q1": {"exact": np.zeros(3)}}
    xp, xm = (d + sq) / (2 * d), (d - sq) / (2 * d)
    for label, sign in (("Q2", 1), ("Q3", -1)):
        seeds[label] = {
            "exact": None if rl is None else np.array([xp, h / b * (-1 + sign * rl) / (d + sq), (-1 + sign * rl) / (2 * b)])
        }
    for label, sign in (("Q4", 1), ("Q5", -1)):
        entry = {}
        if rl is not None and rg is not None:
            entry["literal"] = np.array([xm, h / b * (-1 + sign * rl) / (d - sq), (-1 + sign * rg) / (2 * b)])
        else:
            entry["literal"] = None
        entry["consistent"] = None if rg is None else np.array(
            [xm, h / b * (-1 + sign * rg) / (d - sq), (-1 + sign * rg) / (2 * b)]
        )
        seeds[label] = entry
    seeds["_aux"] = {"Delta": disc, "Lambda": lam, "Gamma": gam}
    return seeds


def flagship_equilibria(p: SystemParams = DEFAULT_PARAMS) -> EquilibriumSet:
    """The (up to) five real equilibria of the flagship system, Newton-refined.

    Each closed-form candidate is used as a Newton seed; the reading whose raw
    residual is smallest is kept and named in ``closed_form``.
    """
    model = SystemModel.flagship(p)
    seeds = closed_form_seeds(p)
    aux = seeds.pop("_aux")
    reports, degenerate = [], []
    for label in ("Q1", "Q2", "Q3", "Q4", "Q5"):
        if label == "Q1":
            reports.append(_report(model, "Q1", np.zeros(3), "exact"))
            continue
        candidates = {k: v for k, v in seeds[label].items() if v is not None}
        if not candidates:
            degenerate.append({"label": label, "reason": "complex-valued closed form", **aux})
            continue
        ranked = sorted(candidates.items(), key=lambda kv: np.linalg.norm(model(kv[1])))
        for name, seed in ranked:
            try:
                point = newton_refine(model, seed)
            except NewtonError:
                continue
            reports.append(_report(model, label, point, name))
            break
        else:
            degenerate.append({"label": label, "reason": "Newton refinement failed", **aux})
    return EquilibriumSet(reports, degenerate)


def find_equilibria(model: SystemModel, seeds, tol: float = RESIDUAL_TOL, merge: float = 1e-6) -> list[np.ndarray]:
    """Distinct Newton limits reached from ``seeds``."""
    found: list[np.ndarray] = []
    for s in seeds:
        try:
            x = newton_refine(model, s, tol=tol)
        except NewtonError:
            continue
        if not any(np.linalg.norm(x - y) < merge * max(1.0, np.linalg.norm(y)) for y in found):
            found.append(x)
    return found


def grid_seeds(lo: float = -10.0, hi: float = 10.0, num: int = 10, n: int = 3):
    axis = np.linspace(lo, hi, num)
    return (np.array(s) for s in itertools.product(axis, repeat=n))


def equilibrium_reports(model: SystemModel, points, labels: Optional[Sequence[str]] = None) -> list[EquilibriumReport]:
    """Reports for equilibria of a generic model."""
    labels = labels or [f"E{i + 1}" for i in range(len(points))]
    return [_report(model, lab, pt, "newton") for lab, pt in zip(labels, points)]
