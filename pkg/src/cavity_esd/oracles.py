"""Independent reference dynamics.

* :func:`tcl_direct` integrates the master equation written with explicit
  Pauli-operator superoperators, without the block structure used by the
  propagator.
* :func:`rabi_joint` evolves each atom-cavity pair under the full quantum
  Rabi Hamiltonian on a truncated Fock space and traces the cavities out.
* :func:`jc_reference` is the closed-form Jaynes-Cummings (rotating-wave)
  result for a vacuum cavity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .entanglement import InitialStateSpec, StateKind, concurrence_general, concurrence_x, initial_state
from .kernels import SystemParams, kernel_scalars
from .numerics import DEFAULT_SETTINGS, OdeSettings, hermitian_eigensystem, integrate_adaptive, unitary_evolve
from .propagator import apply_local_map

__all__ = [
    "SIGMA_Z",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
    "SUPEROPERATORS",
    "ConcurrenceSeries",
    "RabiConfig",
    "TruncationWarning",
    "tcl_generator",
    "tcl_direct",
    "tcl_direct_superoperator",
    "rabi_hamiltonian",
    "rabi_single",
    "rabi_reduced_states",
    "rabi_joint",
    "truncation_residual",
    "converge_n_cut",
    "jc_excited_amplitude",
    "jc_superoperator",
    "jc_reference",
]

# qubit basis (|1>, |0>)
SIGMA_Z = np.diag([1.0 + 0j, -1.0])
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
_P_EXC = SIGMA_PLUS @ SIGMA_MINUS

SUPEROPERATORS = {
    "J0": lambda r: (SIGMA_Z @ r - r @ SIGMA_Z) / 4,
    "J+": lambda r: SIGMA_PLUS @ r @ SIGMA_PLUS,
    "J-": lambda r: SIGMA_MINUS @ r @ SIGMA_MINUS,
    "K0": lambda r: (_P_EXC @ r + r @ _P_EXC - r) / 2,
    "K+": lambda r: SIGMA_PLUS @ r @ SIGMA_MINUS,
    "K-": lambda r: SIGMA_MINUS @ r @ SIGMA_PLUS,
}


@dataclass(frozen=True)
class ConcurrenceSeries:
    times: np.ndarray
    values: np.ndarray


class TruncationWarning(RuntimeWarning):
    pass


def tcl_generator(t: float, rho: np.ndarray, params: SystemParams) -> np.ndarray:
    """Right-hand side of the vacuum master equation for a stack of 2x2 matrices.

    The identity term uses the real part of ``f``, which keeps the trace
    constant.
    """
    a, f, _, _ = kernel_scalars(t, params)
    g2 = params.g**2
    so = SUPEROPERATORS
    return (
        -g2 * (a.real + f.real) * rho
        - 2j * (params.omega0 - g2 * a.imag + g2 * f.imag) * so["J0"](rho)
        + g2 * (a + f.conjugate()) * so["J+"](rho)
        + g2 * (a.conjugate() + f) * so["J-"](rho)
        + 2 * g2 * a.real * so["K+"](rho)
        + 2 * g2 * (a.real - f.real) * so["K0"](rho)
        + 2 * g2 * f.real * so["K-"](rho)
    )


def tcl_direct(rho0, params: SystemParams, t_grid, settings: OdeSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Qubit density matrices on ``t_grid`` by direct integration, shape ``(T, 2, 2)``."""
    rho0 = np.asarray(rho0, dtype=complex)
    out = integrate_adaptive(
        lambda t, y: tcl_generator(t, y.reshape(rho0.shape), params).ravel(),
        rho0.ravel(), t_grid, settings,
    )
    return out.reshape((-1,) + rho0.shape)


def tcl_direct_superoperator(params: SystemParams, t_grid, settings: OdeSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Evolve the four basis matrices together; returns ``(T, 4, 4)`` maps."""
    basis = np.eye(4, dtype=complex).reshape(4, 2, 2)
    images = tcl_direct(basis, params, t_grid, settings)  # (T, k, 2, 2)
    return np.transpose(images.reshape(-1, 4, 4), (0, 2, 1))


@dataclass(frozen=True)
class RabiConfig:
    params: SystemParams
    n_cut: int = 40
    rotating_wave: bool = False

    def __post_init__(self):
        if self.n_cut < 8:
            raise ValueError("n_cut must be at least 8")


def rabi_hamiltonian(config: RabiConfig) -> np.ndarray:
    """Atom-cavity Hamiltonian on (atom) x (Fock 0..n_cut-1)."""
    p, n = config.params, config.n_cut
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    eye_f = np.eye(n)
    h = p.omega0 / 2 * np.kron(SIGMA_Z, eye_f) + p.omega * np.kron(np.eye(2), a.conj().T @ a)
    if config.rotating_wave:
        h = h + p.g * (np.kron(SIGMA_PLUS, a) + np.kron(SIGMA_MINUS, a.conj().T))
    else:
        h = h + p.g * np.kron(SIGMA_PLUS + SIGMA_MINUS, a + a.conj().T)
    return h


def rabi_single(config: RabiConfig, t_grid) -> np.ndarray:
    """Images of |1,vac> and |0,vac>: array ``(T, 2, 2, n_cut)``.

    Index order is (time, initial atom state, atom, photon number).
    """
    n = config.n_cut
    h = rabi_hamiltonian(config)
    spec = hermitian_eigensystem(h)
    psi0 = np.zeros((2 * n, 2), dtype=complex)
    psi0[0, 0] = 1.0  # |1> (x) |0>
    psi0[n, 1] = 1.0  # |0> (x) |0>
    out = np.empty((len(t_grid), 2, 2, n), dtype=complex)
    for i, t in enumerate(np.asarray(t_grid, dtype=float)):
        cols = unitary_evolve(h, psi0, t, spectrum=spec)
        out[i] = cols.T.reshape(2, 2, n)
    return out


def rabi_reduced_states(spec: InitialStateSpec, single: np.ndarray) -> np.ndarray:
    """Two-atom reduced states from single-pair images, ``(T, 4, 4)``."""
    e, g_ = single[:, 0], single[:, 1]
    if spec.kind is StateKind.PHI:
        # beta|0>_A|1>_B + eta|1>_A|0>_B
        terms = [(spec.beta, g_, e), (spec.eta, e, g_)]
    else:
        # beta|0>_A|0>_B + eta|1>_A|1>_B
        terms = [(spec.beta, g_, g_), (spec.eta, e, e)]
    psi = sum(c * np.einsum("tan,tbm->tanbm", ua, ub) for c, ua, ub in terms)
    rho = np.einsum("tanbm,tcndm->tabcd", psi, psi.conj())
    return rho.reshape(-1, 4, 4)


def truncation_residual(config: RabiConfig, t_grid, n_other: int | None = None) -> float:
    """Largest change of the reduced single-atom images when ``n_cut`` changes.

    The images are compared on the atom index after tracing the cavity, so the
    value bounds the change of every two-atom reduced state built from them.
    """
    n_other = 2 * config.n_cut if n_other is None else n_other
    other = RabiConfig(config.params, n_other, config.rotating_wave)
    a = rabi_single(config, t_grid)
    b = rabi_single(other, t_grid)
    # Gram matrices over photon number determine every reduced state
    ga = np.einsum("tian,tjbn->tiajb", a, a.conj())
    gb = np.einsum("tian,tjbn->tiajb", b, b.conj())
    return float(np.max(np.abs(ga - gb)))


def converge_n_cut(config: RabiConfig, t_grid, tol: float = 1e-8, n_max: int = 640) -> tuple[RabiConfig, float]:
    """Double ``n_cut`` until the doubling residual drops below ``tol``."""
    while True:
        residual = truncation_residual(config, t_grid)
        if residual < tol or 2 * config.n_cut > n_max:
            return config, residual
        config = RabiConfig(config.params, 2 * config.n_cut, config.rotating_wave)


def rabi_joint(
    spec: InitialStateSpec,
    config: RabiConfig,
    t_grid,
    check_truncation: bool = True,
    tol: float = 1e-8,
) -> tuple[np.ndarray, ConcurrenceSeries]:
    """Reduced two-atom states and concurrence under the full Rabi model.

    With ``check_truncation`` the run is repeated at ``2 * n_cut``; a
    :class:`TruncationWarning` reports the residual when it exceeds ``tol``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    rho = rabi_reduced_states(spec, rabi_single(config, t_grid))
    conc = np.array([concurrence_general(r) for r in rho])
    if check_truncation:
        residual = truncation_residual(config, t_grid)
        if residual > tol:
            warnings.warn(
                f"Fock truncation n_cut={config.n_cut} not converged: residual {residual:.3g}",
                TruncationWarning,
                stacklevel=2,
            )
    return rho, ConcurrenceSeries(t_grid, conc)


def jc_excited_amplitude(params: SystemParams, t):
    """Amplitude of |1,vac> under the rotating-wave Hamiltonian.

    Taken in the frame where |0,vac> carries no phase.
    """
    t = np.asarray(t, dtype=float)
    d, g = params.delta, params.g
    big_omega = math.sqrt(d * d + 4 * g * g)
    mean = (params.omega0 + params.omega) / 2
    return np.exp(-1j * mean * t) * (
        np.cos(big_omega * t / 2) - 1j * (d / big_omega) * np.sin(big_omega * t / 2)
    )


def jc_superoperator(params: SystemParams, t) -> np.ndarray:
    """Single-qubit amplitude-damping map of the vacuum JC model, ``(..., 4, 4)``."""
    u = jc_excited_amplitude(params, t)
    s = np.zeros(np.shape(u) + (4, 4), dtype=complex)
    pop = np.abs(u) ** 2
    s[..., 0, 0] = pop
    s[..., 3, 0] = 1 - pop
    s[..., 3, 3] = 1.0
    s[..., 1, 1] = u
    s[..., 2, 2] = np.conj(u)
    return s


def jc_reference(spec: InitialStateSpec, params: SystemParams, t_grid) -> ConcurrenceSeries:
    """Closed-form rotating-wave concurrence for a vacuum cavity."""
    t_grid = np.asarray(t_grid, dtype=float)
    rho = apply_local_map(initial_state(spec), jc_superoperator(params, t_grid))
    return ConcurrenceSeries(t_grid, np.array([concurrence_x(r) for r in rho]))
