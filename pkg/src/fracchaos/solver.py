"""Fractional Adams-Bashforth-Moulton (PECE) integration of Caputo IVPs.

Each state component ``i`` obeys ``D^{q_i} x_i = f_i(x)`` with ``0 < q_i <= 1``
and a single initial condition ``x_i(0)``. The scheme keeps the full history,
so a run of ``N`` steps costs ``O(N^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gamma

from .core import ContractError, OrderVector, SystemModel, as_state

BLOWUP_LIMIT = 1e9


class DivergenceError(ArithmeticError):
    """The numerical solution left the finite range.

    ``last_index`` is the last grid index whose state is valid; ``trajectory``
    holds the states up to and including it.
    """

    def __init__(self, last_index: int, trajectory: "Trajectory"):
        super().__init__(f"solution diverged after grid index {last_index} (t={trajectory.times[-1]:g})")
        self.last_index = last_index
        self.trajectory = trajectory


@dataclass(frozen=True)
class SolverConfig:
    h: float
    T: float
    orders: OrderVector

    def __post_init__(self):
        if not (np.isfinite(self.h) and self.h > 0):
            raise ContractError(f"step size must be positive, got {self.h}")
        if not (np.isfinite(self.T) and self.T > 0):
            raise ContractError(f"horizon must be positive, got {self.T}")
        if self.steps < 1:
            raise ContractError("horizon shorter than one step")
        if not isinstance(self.orders, OrderVector):
            object.__setattr__(self, "orders", OrderVector(self.orders))

    @property
    def steps(self) -> int:
        return int(round(self.T / self.h))

    @classmethod
    def commensurate(cls, alpha, h: float, T: float, n: int = 3) -> "SolverConfig":
        return cls(h=h, T=T, orders=OrderVector.commensurate(alpha, n))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    config: SolverConfig

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def tail(self, fraction: float = 0.25) -> np.ndarray:
        """States over the last ``fraction`` of the horizon."""
        start = int(np.floor(len(self.states) * (1 - fraction)))
        return self.states[start:]


def _weights(q: np.ndarray, N: int):
    """Predictor and corrector weight tables, one column per component."""
    k = np.arange(N + 2, dtype=float)[:, None]
    # predictor weight for lag n - j = k
    bw = (k[:-1] + 1) ** q - k[:-1] ** q
    # corrector weight for lag n - j = m, 1 <= j <= n
    aw = (k[:-1] + 2) ** (q + 1) + k[:-1] ** (q + 1) - 2 * (k[:-1] + 1) ** (q + 1)
    # corrector weight of the initial value at step n -> n+1
    a0 = k[:-1] ** (q + 1) - (k[:-1] - q) * (k[:-1] + 1) ** q
    return bw, aw, a0


def _check_finite(x: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(x)) and np.all(np.abs(x) <= BLOWUP_LIMIT))


def solve_pece(model: SystemModel, x0, cfg: SolverConfig) -> Trajectory:
    """Integrate ``D^q x = f(x)``, ``x(0) = x0`` on a uniform grid.

    One predictor (fractional Adams-Bashforth) and one corrector
    (fractional Adams-Moulton) evaluation per step.

    Raises
    ------
    DivergenceError
        If any component becomes non-finite or exceeds ``BLOWUP_LIMIT``.
    """
    x0 = as_state(x0)
    n_state = model.n
    if x0.shape[0] != n_state:
        raise ContractError(f"initial condition has dimension {x0.shape[0]}, model has {n_state}")
    if len(cfg.orders) != n_state:
        raise ContractError(f"order vector has length {len(cfg.orders)}, model has {n_state}")

    q = cfg.orders.as_array()
    N = cfg.steps
    h = cfg.h
    bw, aw, a0 = _weights(q, N)
    pred_scale = h**q / gamma(q + 1)
    corr_scale = h**q / gamma(q + 2)

    X = np.empty((N + 1, n_state))
    F = np.empty((N + 1, n_state))
    X[0] = x0
    F[0] = model(x0)

    def _abort(last):
        times = np.arange(last + 1) * h
        raise DivergenceError(last, Trajectory(times, X[: last + 1].copy(), cfg))

    if not _check_finite(F[0]):
        _abort(0)

    for n in range(N):
        hist = F[: n + 1]
        pred = np.einsum("ij,ij->j", bw[n::-1], hist)
        xp = x0 + pred_scale * pred
        if not _check_finite(xp):
            _abort(n)
        fp = model(xp)
        if n > 0:
            corr = a0[n] * F[0] + np.einsum("ij,ij->j", aw[n - 1 :: -1], F[1 : n + 1])
        else:
            corr = a0[0] * F[0]
        x_new = x0 + corr_scale * (fp + corr)
        if not _check_finite(x_new):
            _abort(n)
        f_new = model(x_new)
        if not _check_finite(f_new):
            _abort(n)
        X[n + 1] = x_new
        F[n + 1] = f_new

    times = np.arange(N + 1) * h
    return Trajectory(times, X, cfg)


def closed_loop_model(model: SystemModel, controller) -> SystemModel:
    """The closed-loop field ``f(x) + u(x)`` for a feedback ``controller``.

    ``controller`` needs ``gains`` and ``target`` attributes; ``u(x) = -K (x - target)``
    with ``K = diag(gains)``.
    """
    K = np.asarray(controller.gains, dtype=float)
    target = as_state(controller.target)
    if K.shape[0] != model.n or target.shape[0] != model.n:
        raise ContractError("controller dimension does not match the model")
    if not np.any(K):
        return model

    def f(s):
        return model(s) - K * (s - target)

    def jac(s):
        return model.jac(s) - np.diag(K)

    return SystemModel(n=model.n, f=f, jacobian=jac, params=model.params, name=f"{model.name}+feedback")


def solve_controlled(model: SystemModel, controller, x0, cfg: SolverConfig) -> Trajectory:
    return solve_pece(closed_loop_model(model, controller), x0, cfg)


def rk4(model: SystemModel, x0, h: float, T: float) -> np.ndarray:
    """Classical fixed-step RK4, returning the states on the grid."""
    x = as_state(x0, model.n)
    N = int(round(T / h))
    out = np.empty((N + 1, model.n))
    out[0] = x
    for n in range(N):
        k1 = model(x)
        k2 = model(x + 0.5 * h * k1)
        k3 = model(x + 0.5 * h * k2)
        k4 = model(x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[n + 1] = x
    return out


def spread(states: np.ndarray) -> float:
    """Largest pairwise distance among ``states`` (the diameter of the set)."""
    states = np.asarray(states)
    if len(states) < 2:
        return 0.0
    from scipy.spatial.distance import pdist

    # thinned to at most ~2000 points to bound the O(m^2) pair count
    step = max(1, len(states) // 2000)
    return float(pdist(states[::step]).max())
