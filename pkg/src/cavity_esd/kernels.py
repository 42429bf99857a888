"""Time-dependent kernels of the vacuum-cavity master equation.

All frequencies are in units of the coupling ``g`` unless ``g`` is set
explicitly. The kernels are

    alpha(t) = (1 - exp(-i Delta t)) / (i Delta)
    f(t)     = (exp(i delta t) - 1) / (i delta)

together with their running integrals ``alpha_tilde`` and ``F``. Writing
them as ``t * phi1(z)`` and ``t**2 * phi2(z)`` with ``phi1(z) = (e^z-1)/z``
and ``phi2(z) = (e^z-1-z)/z**2`` keeps every value finite and free of
cancellation as the detuning goes to zero.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SystemParams",
    "KernelValues",
    "CoefficientSet",
    "evaluate_kernels",
    "coefficient_set",
    "decay_rate",
]

# below this |z| the phi functions are summed as power series
SERIES_THRESHOLD = 0.5
_N_TERMS = 22


@dataclass(frozen=True)
class SystemParams:
    omega0: float
    omega: float
    g: float = 1.0
    Delta: float = field(init=False)
    delta: float = field(init=False)

    def __post_init__(self):
        for name in ("omega0", "omega", "g"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        object.__setattr__(self, "Delta", self.omega + self.omega0)
        object.__setattr__(self, "delta", self.omega0 - self.omega)

    @classmethod
    def from_detuning(cls, omega0: float, delta: float = 0.0, g: float = 1.0) -> "SystemParams":
        """Build from the atomic frequency and detuning ``omega0 - omega``."""
        return cls(omega0=omega0, omega=omega0 - delta, g=g)


def _phi(z, order: int):
    """phi_order(z) for order 1 or 2, elementwise on complex arrays."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < SERIES_THRESHOLD
    if np.any(small):
        zs = z[small]
        acc = np.zeros_like(zs)
        # Horner on sum_k z^k / (k + order)!
        for k in range(_N_TERMS, -1, -1):
            acc = acc * zs + 1.0 / math.factorial(k + order)
        out[small] = acc
    big = ~small
    if np.any(big):
        zb = z[big]
        em1 = np.expm1(zb)
        out[big] = em1 / zb if order == 1 else (em1 - zb) / zb**2
    return out


_SERIES1 = [1.0 / math.factorial(k + 1) for k in range(_N_TERMS, -1, -1)]
_SERIES2 = [1.0 / math.factorial(k + 2) for k in range(_N_TERMS, -1, -1)]


def _phi12_scalar(z: complex) -> tuple[complex, complex]:
    if abs(z) < SERIES_THRESHOLD:
        a1 = a2 = 0j
        for c1, c2 in zip(_SERIES1, _SERIES2):
            a1 = a1 * z + c1
            a2 = a2 * z + c2
        return a1, a2
    em1 = cmath.exp(z) - 1.0
    return em1 / z, (em1 - z) / (z * z)


def kernel_scalars(t: float, params: "SystemParams") -> tuple[complex, complex, complex, complex]:
    """(alpha, f, alpha_tilde, F) at a scalar time; fast path for ODE right-hand sides."""
    a1, a2 = _phi12_scalar(-1j * params.Delta * t)
    f1, f2 = _phi12_scalar(1j * params.delta * t)
    return t * a1, t * f1, t * t * a2, t * t * f2


@dataclass(frozen=True)
class KernelValues:
    alpha: complex
    f: complex
    alpha_tilde: complex
    F_int: complex
    gamma_k: float


def evaluate_kernels(t, params: SystemParams) -> KernelValues:
    """Kernel values at time ``t`` (scalar or array)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be non-negative")
    zs = -1j * params.Delta * t_arr
    zd = 1j * params.delta * t_arr
    alpha = t_arr * _phi(zs, 1)
    f = t_arr * _phi(zd, 1)
    alpha_tilde = t_arr**2 * _phi(zs, 2)
    F_int = t_arr**2 * _phi(zd, 2)
    gamma_k = params.g**2 * (alpha_tilde.real + F_int.real)
    if t_arr.ndim == 0:
        return KernelValues(complex(alpha), complex(f), complex(alpha_tilde), complex(F_int), float(gamma_k))
    return KernelValues(alpha, f, alpha_tilde, F_int, gamma_k)


@dataclass(frozen=True)
class CoefficientSet:
    eps0: complex
    eps_plus: complex
    eps_minus: complex
    nu0: float
    nu_plus: float
    nu_minus: float


def coefficient_set(t, params: SystemParams) -> CoefficientSet:
    k = evaluate_kernels(t, params)
    g2 = params.g**2
    a, f = np.asarray(k.alpha), np.asarray(k.f)
    eps0 = -2j * (params.omega0 - g2 * a.imag + g2 * f.imag)
    eps_plus = g2 * (a + np.conj(f))
    eps_minus = g2 * (np.conj(a) + f)
    nu0 = 2 * g2 * (a.real - f.real)
    nu_plus = 2 * g2 * a.real
    nu_minus = 2 * g2 * f.real
    if np.ndim(t) == 0:
        return CoefficientSet(
            complex(eps0), complex(eps_plus), complex(eps_minus),
            float(nu0), float(nu_plus), float(nu_minus),
        )
    return CoefficientSet(eps0, eps_plus, eps_minus, nu0, nu_plus, nu_minus)


def decay_rate(t, params: SystemParams):
    """Time derivative of ``gamma_k``: ``g**2 * (Re alpha + Re f)``."""
    k = evaluate_kernels(t, params)
    return params.g**2 * (np.real(k.alpha) + np.real(k.f))
