"""Domain types and the flagship three-dimensional chaotic vector field.

The flagship model is

    D^q x = y - a x + b y z
    D^q y = c y - x z + z
    D^q z = d x y - h z

with Caputo derivatives of order ``q`` and positive parameters ``a, b, c, d, h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Optional, Sequence

import numpy as np

FD_STEP = 1e-6


class ContractError(ValueError):
    """Raised when an argument violates a documented precondition."""


def _as_fraction(q) -> Fraction:
    if isinstance(q, (Fraction, int, str)):
        return Fraction(q)
    # shortest decimal repr: 0.9 -> 9/10, 0.999999999 -> 999999999/10**9
    return Fraction(str(float(q)))


@dataclass(frozen=True)
class OrderVector:
    """Per-state Caputo differentiation orders, each a rational in (0, 1].

    Floats are read through their shortest decimal representation
    (0.9 -> 9/10, 0.77 -> 77/100); strings such as ``"2/3"`` are exact.
    """

    orders: tuple[Fraction, ...]

    def __init__(self, orders: Sequence):
        fr = tuple(_as_fraction(q) for q in orders)
        if not fr:
            raise ContractError("order vector must be non-empty")
        for q in fr:
            if not (0 < q <= 1):
                raise ContractError(f"order {q} outside (0, 1]")
        object.__setattr__(self, "orders", fr)

    @classmethod
    def commensurate(cls, alpha, n: int = 3) -> "OrderVector":
        return cls([alpha] * n)

    def __len__(self) -> int:
        return len(self.orders)

    def __iter__(self):
        return iter(self.orders)

    @property
    def is_commensurate(self) -> bool:
        return len(set(self.orders)) == 1

    @property
    def numerators(self) -> tuple[int, ...]:
        return tuple(q.numerator for q in self.orders)

    @property
    def denominators(self) -> tuple[int, ...]:
        return tuple(q.denominator for q in self.orders)

    @property
    def lcm(self) -> int:
        m = 1
        for d in self.denominators:
            m = m * d // gcd(m, d)
        return m

    def as_array(self) -> np.ndarray:
        return np.array([float(q) for q in self.orders])

    def effective_dimension(self) -> float:
        """Sum of all orders."""
        return float(sum(self.orders))


@dataclass(frozen=True)
class SystemParams:
    a: float = 3.0
    b: float = 2.7
    c: float = 4.7
    d: float = 2.0
    h: float = 9.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "h"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ContractError(f"parameter {name}={v} must be strictly positive")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.h)


DEFAULT_PARAMS = SystemParams()


def as_state(s, n: Optional[int] = None) -> np.ndarray:
    """Validate and copy ``s`` into a finite 1-D float array."""
    arr = np.array(s, dtype=float).reshape(-1)
    if n is not None and arr.shape[0] != n:
        raise ContractError(f"expected a state of dimension {n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ContractError("state has non-finite components")
    return arr


def flagship_vector_field(s, p: SystemParams = DEFAULT_PARAMS) -> np.ndarray:
    x, y, z = as_state(s, 3)
    return np.array([
        y - p.a * x + p.b * y * z,
        p.c * y - x * z + z,
        p.d * x * y - p.h * z,
    ])


def flagship_jacobian(s, p: SystemParams = DEFAULT_PARAMS) -> np.ndarray:
    x, y, z = as_state(s, 3)
    return np.array([
        [-p.a, 1.0 + p.b * z, p.b * y],
        [-z, p.c, 1.0 - x],
        [p.d * y, p.d * x, -p.h],
    ])


def finite_difference_jacobian(f: Callable, s, step: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian of ``f`` at ``s``."""
    s = as_state(s)
    n = s.shape[0]
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        cols.append((np.asarray(f(s + e), dtype=float) - np.asarray(f(s - e), dtype=float)) / (2 * step))
    return np.column_stack(cols)


@dataclass(frozen=True)
class SystemModel:
    """Autonomous vector field ``f`` of dimension ``n`` with its Jacobian.

    When ``jacobian`` is omitted, central finite differences of ``f`` are used.
    """

    n: int
    f: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: Optional[SystemParams] = None
    name: str = "model"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ContractError("dimension must be a positive integer")

    def __call__(self, s) -> np.ndarray:
        return np.asarray(self.f(s), dtype=float)

    def jac(self, s) -> np.ndarray:
        s = as_state(s, self.n)
        if self.jacobian is None:
            return finite_difference_jacobian(self.f, s)
        J = np.asarray(self.jacobian(s), dtype=float)
        if J.shape != (self.n, self.n):
            raise ContractError(f"Jacobian shape {J.shape} inconsistent with n={self.n}")
        return J

    @classmethod
    def flagship(cls, p: SystemParams = DEFAULT_PARAMS) -> "SystemModel":
        return cls(
            n=3,
            f=lambda s: flagship_vector_field(s, p),
            jacobian=lambda s: flagship_jacobian(s, p),
            params=p,
            name="flagship",
        )

    @classmethod
    def zero(cls, n: int = 3) -> "SystemModel":
        return cls(n=n, f=lambda s: np.zeros(n), jacobian=lambda s: np.zeros((n, n)), name="zero")

    @classmethod
    def linear(cls, A) -> "SystemModel":
        """The linear system ``D^q x = A x``."""
        A = np.atleast_2d(np.array(A, dtype=float))
        return cls(n=A.shape[0], f=lambda s: A @ s, jacobian=lambda s: A, name="linear")
