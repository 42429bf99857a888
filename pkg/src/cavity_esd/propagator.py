"""Single-qubit dynamical map and two-qubit joint state.

Two routes produce the same map:

* the Riccati route integrates the disentangling parameters ``j+, j0, j-``
  and ``k+, k0, k-`` and evaluates the closed-form map entries;
* the transfer route integrates the two 2x2 linear blocks of the generator
  (populations and coherences) directly. It never becomes singular and is
  the default.

Qubit matrices use the basis ``(|1>, |0>)``; two-qubit matrices use
``(|11>, |10>, |01>, |00>)``. Vectorized single-qubit matrices are ordered
``(rho11, rho10, rho01, rho00)``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .kernels import SystemParams, evaluate_kernels, kernel_scalars
from .numerics import DEFAULT_SETTINGS, OdeSettings, integrate_adaptive

__all__ = [
    "RiccatiSingularityError",
    "StructureError",
    "RiccatiState",
    "MapCoefficients",
    "rate_function",
    "solve_riccati",
    "integrate_riccati",
    "map_coefficients",
    "build_transfer_matrix",
    "transfer_map_coefficients",
    "map_trajectory",
    "superoperator",
    "propagate_single",
    "assemble_joint",
    "apply_local_map",
    "X_MASK",
]

BLOWUP_LIMIT = 1e8

# nonzero pattern of an X-state in the (|11>, |10>, |01>, |00>) basis
X_MASK = np.eye(4, dtype=bool) | np.eye(4, dtype=bool)[::-1]


class RiccatiSingularityError(ArithmeticError):
    def __init__(self, t_fail: float, family: str):
        super().__init__(f"Riccati variable {family}+ exceeded {BLOWUP_LIMIT:g} at t={t_fail:.10g}")
        self.t_fail = t_fail
        self.family = family


class StructureError(ValueError):
    pass


def rate_function(params: SystemParams):
    """Scalar closure ``t -> (eps0, eps+, eps-, nu0, nu+, nu-, dGamma/dt)``."""
    g2 = params.g**2
    w0 = params.omega0

    def rates(t: float):
        a, f, _, _ = kernel_scalars(t, params)
        eps0 = -2j * (w0 - g2 * a.imag + g2 * f.imag)
        eps_p = g2 * (a + f.conjugate())
        eps_m = g2 * (a.conjugate() + f)
        nu0 = 2 * g2 * (a.real - f.real)
        nu_p = 2 * g2 * a.real
        nu_m = 2 * g2 * f.real
        return eps0, eps_p, eps_m, nu0, nu_p, nu_m, g2 * (a.real + f.real)

    return rates


@dataclass(frozen=True)
class RiccatiState:
    j_plus: np.ndarray
    j_zero: np.ndarray
    j_minus: np.ndarray
    k_plus: np.ndarray
    k_zero: np.ndarray
    k_minus: np.ndarray

    @classmethod
    def zeros(cls, shape=()) -> "RiccatiState":
        return cls(*(np.zeros(shape, dtype=complex) for _ in range(6)))


@dataclass(frozen=True)
class MapCoefficients:
    """Entries of the unnormalized map plus the exponent ``gamma_k``.

    The physical map is ``exp(-gamma_k)`` times these entries; see
    :meth:`physical`.
    """

    l: np.ndarray
    m: np.ndarray
    n: np.ndarray
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    x: np.ndarray
    y: np.ndarray
    gamma_k: np.ndarray

    @classmethod
    def identity(cls) -> "MapCoefficients":
        return cls(1.0, 0.0, 1.0, 0.0, 1.0 + 0j, 0j, 1.0 + 0j, 0j, 0.0)

    def physical(self) -> dict[str, np.ndarray]:
        """The eight entries scaled by ``exp(-gamma_k)``."""
        s = np.exp(-np.asarray(self.gamma_k, dtype=float))
        return {f.name: s * np.asarray(getattr(self, f.name)) for f in fields(self) if f.name != "gamma_k"}

    def at(self, i: int) -> "MapCoefficients":
        return MapCoefficients(*(np.asarray(getattr(self, f.name))[i] for f in fields(self)))

    def __len__(self) -> int:
        return np.size(self.gamma_k)


def _riccati_rhs(mu0, mu_p, mu_m, xp, x0):
    return mu_p - mu_m * xp * xp + mu0 * xp, mu0 - 2 * mu_m * xp, mu_m * np.exp(x0)


def integrate_riccati(mu, t_grid, settings: OdeSettings = DEFAULT_SETTINGS, family: str = "X") -> np.ndarray:
    """Integrate one Riccati family from zero initial conditions.

    ``mu(t)`` returns ``(mu0, mu_plus, mu_minus)``. Returns an array of
    shape ``(len(t_grid), 3)`` with columns ``(X+, X0, X-)``.
    """
    t_grid = _check_grid(t_grid)

    def rhs(t, y):
        if abs(y[0]) > BLOWUP_LIMIT:
            raise RiccatiSingularityError(t, family)
        mu0, mu_p, mu_m = mu(t)
        return np.array(_riccati_rhs(mu0, mu_p, mu_m, y[0], y[1]), dtype=complex)

    out = integrate_adaptive(rhs, np.zeros(3, dtype=complex), t_grid, settings)
    big = np.abs(out[:, 0]) > BLOWUP_LIMIT
    if np.any(big):
        raise RiccatiSingularityError(float(t_grid[np.argmax(big)]), family)
    return out


def solve_riccati(params: SystemParams, t_grid, settings: OdeSettings = DEFAULT_SETTINGS) -> RiccatiState:
    """Disentangling parameters of both generator families on ``t_grid``."""
    rates = rate_function(params)

    def mu_j(t):
        e0, ep, em, *_ = rates(t)
        return e0, ep, em

    def mu_k(t):
        _, _, _, n0, n_p, n_m, _ = rates(t)
        return n0, n_p, n_m

    j = integrate_riccati(mu_j, t_grid, settings, family="j")
    k = integrate_riccati(mu_k, t_grid, settings, family="k")
    return RiccatiState(j[:, 0], j[:, 1], j[:, 2], k[:, 0], k[:, 1], k[:, 2])


def map_coefficients(state: RiccatiState, gamma_k) -> MapCoefficients:
    """Closed-form map entries from the disentangling parameters."""
    kp, k0, km = (np.asarray(v) for v in (state.k_plus, state.k_zero, state.k_minus))
    jp, j0, jm = (np.asarray(v) for v in (state.j_plus, state.j_zero, state.j_minus))
    with np.errstate(over="raise", invalid="raise"):
        try:
            ek, ek_inv = np.exp(k0 / 2), np.exp(-k0 / 2)
            ej, ej_inv = np.exp(j0 / 2), np.exp(-j0 / 2)
            l = ek + ek_inv * kp * km
            m = ek_inv * kp
            n = ek_inv
            p = ek_inv * km
            q = ej_inv
            r = ej_inv * jm
            x = ej + ej_inv * jp * jm
            y = ej_inv * jp
        except FloatingPointError as exc:
            raise OverflowError("map coefficient out of floating-point range") from exc
    # the k family is real in exact arithmetic
    l, m, n, p = (np.real(v) for v in (l, m, n, p))
    return MapCoefficients(l, m, n, p, q, r, x, y, np.asarray(gamma_k, dtype=float))


def _check_grid(t_grid) -> np.ndarray:
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t_grid[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("time grid must be strictly ascending")
    return t_grid


def _physical_blocks(params: SystemParams, t_grid, settings: OdeSettings):
    """Integrate the population and coherence blocks of the physical map.

    Returns arrays ``K`` and ``J`` of shape ``(T, 2, 2)``. ``K`` maps
    ``(rho11, rho00)`` and ``J`` maps ``(rho10, rho01)``.
    """
    rates = rate_function(params)

    def rhs(t, y):
        e0, ep, em, n0, n_p, n_m, gam = rates(t)
        k = y[:4].reshape(2, 2)
        j = y[4:].reshape(2, 2)
        a_k = np.array([[n0 / 2 - gam, n_p], [n_m, -n0 / 2 - gam]], dtype=complex)
        a_j = np.array([[e0 / 2 - gam, ep], [em, -e0 / 2 - gam]], dtype=complex)
        return np.concatenate([(a_k @ k).ravel(), (a_j @ j).ravel()])

    y0 = np.concatenate([np.eye(2).ravel(), np.eye(2).ravel()]).astype(complex)
    out = integrate_adaptive(rhs, y0, t_grid, settings)
    return out[:, :4].real.reshape(-1, 2, 2), out[:, 4:].reshape(-1, 2, 2)


def transfer_map_coefficients(
    params: SystemParams, t_grid, settings: OdeSettings = DEFAULT_SETTINGS
) -> MapCoefficients:
    """Map entries from the linear transfer route, in the Riccati convention."""
    t_grid = _check_grid(t_grid)
    K, J = _physical_blocks(params, t_grid, settings)
    gamma_k = np.asarray(evaluate_kernels(t_grid, params).gamma_k)
    with np.errstate(over="raise"):
        try:
            s = np.exp(gamma_k)
        except FloatingPointError as exc:
            raise OverflowError("exp(gamma_k) out of floating-point range; use physical blocks") from exc
    return MapCoefficients(
        l=s * K[:, 0, 0], m=s * K[:, 0, 1], p=s * K[:, 1, 0], n=s * K[:, 1, 1],
        x=s * J[:, 0, 0], y=s * J[:, 0, 1], r=s * J[:, 1, 0], q=s * J[:, 1, 1],
        gamma_k=gamma_k,
    )


def superoperator(coeffs: MapCoefficients) -> np.ndarray:
    """Physical single-qubit map as a ``(..., 4, 4)`` matrix on vectorized states."""
    c = coeffs.physical()
    shape = np.broadcast(*c.values()).shape
    s = np.zeros(shape + (4, 4), dtype=complex)
    s[..., 0, 0], s[..., 0, 3] = c["l"], c["m"]
    s[..., 1, 1], s[..., 1, 2] = c["x"], c["y"]
    s[..., 2, 2], s[..., 2, 1] = c["q"], c["r"]
    s[..., 3, 3], s[..., 3, 0] = c["n"], c["p"]
    return s


def build_transfer_matrix(params: SystemParams, t_grid, settings: OdeSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Trajectory of 4x4 maps on vectorized qubit density matrices.

    Column ``k`` at time ``t`` is the image of the basis matrix with a single
    unit entry at vectorized position ``k``.
    """
    t_grid = _check_grid(t_grid)
    K, J = _physical_blocks(params, t_grid, settings)
    s = np.zeros((t_grid.size, 4, 4), dtype=complex)
    s[:, 0, 0], s[:, 0, 3], s[:, 3, 0], s[:, 3, 3] = K[:, 0, 0], K[:, 0, 1], K[:, 1, 0], K[:, 1, 1]
    s[:, 1, 1], s[:, 1, 2], s[:, 2, 1], s[:, 2, 2] = J[:, 0, 0], J[:, 0, 1], J[:, 1, 0], J[:, 1, 1]
    return s


def map_trajectory(
    params: SystemParams,
    t_grid,
    route: str = "transfer",
    settings: OdeSettings = DEFAULT_SETTINGS,
) -> MapCoefficients:
    """Map coefficients on ``t_grid`` via ``"transfer"``, ``"riccati"`` or
    ``"algebraic"`` (Riccati, falling back to transfer on blow-up)."""
    t_grid = _check_grid(t_grid)
    if route == "transfer":
        return transfer_map_coefficients(params, t_grid, settings)
    if route not in ("riccati", "algebraic"):
        raise ValueError(f"unknown route {route!r}")
    try:
        state = solve_riccati(params, t_grid, settings)
        gamma_k = evaluate_kernels(t_grid, params).gamma_k
        return map_coefficients(state, gamma_k)
    except (RiccatiSingularityError, OverflowError):
        if route == "riccati":
            raise
        return transfer_map_coefficients(params, t_grid, settings)


def propagate_single(rho0, coeffs: MapCoefficients) -> np.ndarray:
    """Apply the map to a 2x2 density matrix (broadcast over time if needed)."""
    rho0 = np.asarray(rho0, dtype=complex)
    c = coeffs.physical()
    r11, r10, r01, r00 = rho0[0, 0], rho0[0, 1], rho0[1, 0], rho0[1, 1]
    out = np.empty(np.shape(c["l"]) + (2, 2), dtype=complex)
    out[..., 0, 0] = c["l"] * r11 + c["m"] * r00
    out[..., 0, 1] = c["x"] * r10 + c["y"] * r01
    out[..., 1, 0] = c["q"] * r01 + c["r"] * r10
    out[..., 1, 1] = c["n"] * r00 + c["p"] * r11
    return out


def assemble_joint(rho0_joint, coeffs: MapCoefficients, atol: float = 1e-12) -> np.ndarray:
    """Two-qubit X-state after both qubits undergo the same local map."""
    rho0 = np.asarray(rho0_joint, dtype=complex)
    if rho0.shape != (4, 4):
        raise StructureError("joint state must be 4x4")
    if np.any(np.abs(rho0[~X_MASK]) > atol):
        raise StructureError("joint state is not X-structured")
    c = coeffs.physical()
    l, m, n, p = c["l"], c["m"], c["n"], c["p"]
    q, r, x, y = c["q"], c["r"], c["x"], c["y"]
    d1, d2, d3, d4 = (rho0[i, i] for i in range(4))
    a14, a23, a32, a41 = rho0[0, 3], rho0[1, 2], rho0[2, 1], rho0[3, 0]

    out = np.zeros(np.shape(l) + (4, 4), dtype=complex)
    out[..., 0, 0] = l * l * d1 + l * m * d2 + m * l * d3 + m * m * d4
    out[..., 1, 1] = l * p * d1 + l * n * d2 + m * p * d3 + m * n * d4
    out[..., 2, 2] = l * p * d1 + p * m * d2 + n * l * d3 + n * m * d4
    out[..., 3, 3] = p * p * d1 + p * n * d2 + n * p * d3 + n * n * d4
    out[..., 0, 3] = x * x * a14 + x * y * a23 + y * x * a32 + y * y * a41
    out[..., 1, 2] = x * r * a14 + x * q * a23 + y * r * a32 + y * q * a41
    # the exact coherence block has q = conj(x) and r = conj(y); taking the
    # lower triangle as the conjugate keeps the state Hermitian to round-off
    # instead of to integration tolerance
    out[..., 2, 1] = np.conj(out[..., 1, 2])
    out[..., 3, 0] = np.conj(out[..., 0, 3])
    return out


def apply_local_map(rho_joint, s_a, s_b=None) -> np.ndarray:
    """Apply single-qubit superoperators ``s_a`` (qubit A) and ``s_b`` (qubit B).

    Works for arbitrary 4x4 inputs and broadcasts over leading axes of the
    superoperators.
    """
    s_b = s_a if s_b is None else s_b
    sa = np.asarray(s_a).reshape(np.shape(s_a)[:-2] + (2, 2, 2, 2))
    sb = np.asarray(s_b).reshape(np.shape(s_b)[:-2] + (2, 2, 2, 2))
    rho = np.asarray(rho_joint, dtype=complex).reshape(2, 2, 2, 2)
    # rho[a, b, a', b']; S[i, j, k, l] maps rho_kl into rho_ij
    out = np.einsum("...ijkl,...mnop,kolp->...imjn", sa, sb, rho)
    return out.reshape(out.shape[:-4] + (4, 4))
