"""Initial Bell-type states and Wootters concurrence."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .propagator import X_MASK, StructureError

__all__ = [
    "StateKind",
    "InitialStateSpec",
    "PhysicalityError",
    "initial_state",
    "initial_amplitudes",
    "concurrence_x",
    "concurrence_x_series",
    "concurrence_general",
]

# round-off allowance for the spin-flipped product's spectrum; anything more
# negative signals a non-physical input rather than floating-point noise
NEGATIVITY_LIMIT = 1e-10
# allowance for the input state's own spectrum
STATE_NEGATIVITY_LIMIT = 1e-6

_SYSY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


class StateKind(str, Enum):
    PHI = "Phi"
    PSI = "Psi"

    @classmethod
    def parse(cls, value) -> "StateKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if str(value).lower() == kind.value.lower():
                return kind
        raise ValueError(f"unknown state kind {value!r}; expected Phi or Psi")


class PhysicalityError(ValueError):
    pass


@dataclass(frozen=True)
class InitialStateSpec:
    """``Phi = beta|01> + eta|10>`` or ``Psi = beta|00> + eta|11>``.

    ``eta = sqrt(1 - beta**2) * exp(i*phase)``.
    """

    kind: StateKind
    beta: float
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", StateKind.parse(self.kind))
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta!r}")

    @classmethod
    def from_beta_sq(cls, kind, beta_sq: float, phase: float = 0.0) -> "InitialStateSpec":
        if not 0 < beta_sq < 1:
            raise ValueError(f"beta_sq must lie in (0, 1), got {beta_sq!r}")
        return cls(kind, math.sqrt(beta_sq), phase)

    @property
    def eta(self) -> complex:
        return math.sqrt(1 - self.beta**2) * complex(math.cos(self.phase), math.sin(self.phase))

    @property
    def initial_concurrence(self) -> float:
        return 2 * self.beta * math.sqrt(1 - self.beta**2)


def initial_amplitudes(spec: InitialStateSpec) -> np.ndarray:
    """State vector in the (|11>, |10>, |01>, |00>) basis."""
    psi = np.zeros(4, dtype=complex)
    if spec.kind is StateKind.PHI:
        psi[2], psi[1] = spec.beta, spec.eta
    else:
        psi[3], psi[0] = spec.beta, spec.eta
    return psi


def initial_state(spec: InitialStateSpec) -> np.ndarray:
    psi = initial_amplitudes(spec)
    return np.outer(psi, psi.conj())


def concurrence_x(rho, atol: float = 1e-12) -> float:
    """Concurrence of an X-state from its diagonal and antidiagonal."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise StructureError("expected a 4x4 matrix")
    if np.any(np.abs(rho[~X_MASK]) > atol):
        raise StructureError("state is not X-structured; use concurrence_general")
    d = np.clip(np.real(np.diag(rho)), 0.0, None)
    c1 = 2 * (abs(rho[1, 2]) - math.sqrt(d[0] * d[3]))
    c2 = 2 * (abs(rho[0, 3]) - math.sqrt(d[1] * d[2]))
    return float(min(max(0.0, c1, c2), 1.0))


def concurrence_x_series(rhos, atol: float = 1e-12) -> np.ndarray:
    """Vectorized :func:`concurrence_x` over a ``(T, 4, 4)`` stack."""
    rhos = np.asarray(rhos)
    if rhos.ndim != 3 or rhos.shape[1:] != (4, 4):
        raise StructureError("expected a (T, 4, 4) stack")
    if np.any(np.abs(rhos[:, ~X_MASK]) > atol):
        raise StructureError("state is not X-structured; use concurrence_general")
    d = np.clip(np.real(np.diagonal(rhos, axis1=1, axis2=2)), 0.0, None)
    c1 = 2 * (np.abs(rhos[:, 1, 2]) - np.sqrt(d[:, 0] * d[:, 3]))
    c2 = 2 * (np.abs(rhos[:, 0, 3]) - np.sqrt(d[:, 1] * d[:, 2]))
    return np.clip(np.maximum(c1, c2), 0.0, 1.0)


def concurrence_general(rho) -> float:
    """Wootters concurrence of an arbitrary two-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    if np.linalg.norm(rho - rho.conj().T) > 1e-8:
        raise PhysicalityError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > 1e-6:
        raise PhysicalityError(f"trace {np.trace(rho).real:.3g} differs from 1")
    if np.linalg.eigvalsh(rho).min() < -STATE_NEGATIVITY_LIMIT:
        raise PhysicalityError("density matrix has a negative eigenvalue")

    r = rho @ _SYSY @ rho.conj() @ _SYSY
    lam = np.sort(np.linalg.eigvals(r).real)[::-1]
    # R is similar to a positive matrix, so negative eigenvalues are round-off
    # or come from a slightly non-positive input
    if lam.min() < -NEGATIVITY_LIMIT:
        raise PhysicalityError(f"spin-flipped product has eigenvalue {lam.min():.3g}")
    lam = np.clip(lam, 0.0, None)
    s = np.sqrt(lam)
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))
