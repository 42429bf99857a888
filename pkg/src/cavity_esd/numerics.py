"""Small dense numerical substrate: adaptive ODE integration, Hermitian
eigensystems and spectral unitary evolution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "OdeSettings",
    "IntegrationError",
    "SpectralDecomposition",
    "integrate_adaptive",
    "hermitian_eigensystem",
    "unitary_evolve",
]


class IntegrationError(RuntimeError):
    """Adaptive integration could not reach the end of the requested span.

    ``t_fail`` is the last time the integrator reached successfully.
    """

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (failed at t={t_fail:.10g})")
        self.t_fail = t_fail


@dataclass(frozen=True)
class OdeSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = np.inf
    initial_step: float | None = None

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")


DEFAULT_SETTINGS = OdeSettings()


def integrate_adaptive(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_eval,
    settings: OdeSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """Integrate ``y' = rhs(t, y)`` and sample the solution at ``t_eval``.

    Uses the DOP853 embedded Runge-Kutta pair with dense output. The first
    entry of ``t_eval`` is the initial time. Complex ``y0`` is supported.

    Returns an array of shape ``(len(t_eval), len(y0))``.
    """
    y0 = np.atleast_1d(np.asarray(y0))
    t_eval = np.atleast_1d(np.asarray(t_eval, dtype=float))
    if t_eval.ndim != 1 or t_eval.size == 0:
        raise ValueError("t_eval must be a non-empty 1-d array")
    t0, t1 = t_eval[0], t_eval[-1]
    if t1 == t0:
        return np.repeat(y0[None, :], t_eval.size, axis=0)
    if np.any(np.diff(t_eval) < 0) and np.any(np.diff(t_eval) > 0):
        raise ValueError("t_eval must be monotone")

    kwargs = dict(rtol=settings.rel_tol, atol=settings.abs_tol, max_step=settings.max_step)
    if settings.initial_step is not None:
        kwargs["first_step"] = settings.initial_step
    sol = solve_ivp(rhs, (t0, t1), y0, method="DOP853", dense_output=True, **kwargs)
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    out = sol.sol(t_eval).T
    # the interpolant is exact at the end point; keep it bitwise
    out[-1] = sol.y[:, -1]
    if not np.all(np.isfinite(out)):
        bad = np.argmax(~np.all(np.isfinite(out), axis=1))
        raise IntegrationError("non-finite solution", float(t_eval[bad]))
    return out


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eigensystem(h) -> SpectralDecomposition:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(np.linalg.norm(h), 1.0)
    if np.linalg.norm(h - h.conj().T) >= 1e-10 * scale:
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(h)
    return SpectralDecomposition(w, v)


def unitary_evolve(h, psi0, t: float, spectrum: SpectralDecomposition | None = None) -> np.ndarray:
    """Return ``exp(-i h t) psi0``.

    ``spectrum`` may be passed to reuse one decomposition across many times.
    ``psi0`` may also be a matrix whose columns are evolved together.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    norms = np.linalg.norm(psi0, axis=0)
    if np.any(np.abs(norms - 1.0) > 1e-10):
        raise ValueError("initial state is not normalized")
    if t == 0:
        return psi0.copy()
    if spectrum is None:
        spectrum = hermitian_eigensystem(h)
    v = spectrum.eigenvectors
    phases = np.exp(-1j * spectrum.eigenvalues * t)
    coeffs = v.conj().T @ psi0
    if coeffs.ndim == 1:
        return v @ (phases * coeffs)
    return v @ (phases[:, None] * coeffs)
