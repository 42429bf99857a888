import math

import numpy as np
import pytest

from cavity_esd.entanglement import InitialStateSpec, concurrence_x, initial_state
from cavity_esd.kernels import SystemParams, evaluate_kernels
from cavity_esd.oracles import tcl_direct
from cavity_esd.propagator import (
    X_MASK,
    MapCoefficients,
    RiccatiSingularityError,
    RiccatiState,
    StructureError,
    apply_local_map,
    assemble_joint,
    build_transfer_matrix,
    integrate_riccati,
    map_coefficients,
    map_trajectory,
    propagate_single,
    solve_riccati,
    superoperator,
    transfer_map_coefficients,
)

from conftest import random_density, random_x_state

EXCITED = np.array([[1, 0], [0, 0]], dtype=complex)
GROUND = np.array([[0, 0], [0, 1]], dtype=complex)
NAMES = "lmnpqrxy"


def max_coeff_diff(a: MapCoefficients, b: MapCoefficients) -> float:
    pa, pb = a.physical(), b.physical()
    return max(float(np.max(np.abs(np.asarray(pa[k]) - pb[k]))) for k in NAMES)


# ---------------------------------------------------------------- Riccati


def test_zero_driving_keeps_zero():
    out = integrate_riccati(lambda t: (0, 0, 0), np.linspace(0, 5, 11))
    assert np.all(out == 0)


def test_constant_plus_driving_is_linear():
    t = np.linspace(0, 5, 11)
    out = integrate_riccati(lambda t: (0, 0.7, 0), t)
    np.testing.assert_allclose(out[:, 0], 0.7 * t, atol=1e-12)
    assert np.all(np.abs(out[:, 1:]) < 1e-14)


def test_riccati_blowup_is_reported():
    # X+' = 1 + X+^2 (mu- = -1) is tan(t), singular at pi/2
    with pytest.raises(RiccatiSingularityError) as info:
        integrate_riccati(lambda t: (0, 1.0, -1.0), np.linspace(0, 3, 31))
    assert 1.5 < info.value.t_fail < math.pi / 2 + 1e-6


def test_riccati_initial_state_is_zero():
    state = solve_riccati(SystemParams.from_detuning(2.0, 0.0), np.linspace(0, 1, 5))
    for name in ("j_plus", "j_zero", "j_minus", "k_plus", "k_zero", "k_minus"):
        assert getattr(state, name)[0] == 0


def test_k_family_stays_real():
    state = solve_riccati(SystemParams.from_detuning(3.0, 0.0), np.linspace(0, 10, 101))
    for v in (state.k_plus, state.k_zero, state.k_minus):
        assert np.max(np.abs(np.imag(v))) < 1e-10


def test_map_from_zero_state_is_identity():
    c = map_coefficients(RiccatiState.zeros(), 0.0)
    assert (c.l, c.n, c.q, c.x) == (1, 1, 1, 1)
    assert (c.m, c.p, c.r, c.y) == (0, 0, 0, 0)


def test_map_coefficient_substitution():
    z = RiccatiState.zeros()
    state = RiccatiState(z.j_plus, z.j_zero, z.j_minus, 0j, complex(2 * math.log(2)), 0j)
    c = map_coefficients(state, 0.0)
    assert c.l == pytest.approx(2.0, abs=1e-15)
    assert c.n == pytest.approx(0.5, abs=1e-15)
    assert c.m == 0 and c.p == 0 and c.q == 1 and c.x == 1


def test_map_coefficient_overflow():
    z = RiccatiState.zeros()
    with pytest.raises(OverflowError):
        map_coefficients(RiccatiState(z.j_plus, z.j_zero, z.j_minus, 0j, 2000 + 0j, 0j), 0.0)


def test_determinants_are_unity():
    # both blocks are exponentials of traceless generators; kept to short
    # times because l*n and m*p grow like exp(2 gamma_k) and cancel
    p = SystemParams.from_detuning(1.5, 0.0)
    t = np.linspace(0, 2, 41)
    c = map_trajectory(p, t, route="riccati")
    np.testing.assert_allclose(c.l * c.n - c.m * c.p, 1.0, rtol=1e-7)
    np.testing.assert_allclose(c.x * c.q - c.y * c.r, 1.0, rtol=1e-7)
    tr = transfer_map_coefficients(p, t)
    np.testing.assert_allclose(tr.l * tr.n - tr.m * tr.p, c.l * c.n - c.m * c.p, rtol=1e-6)


# ------------------------------------------------------- route equivalence


def test_riccati_route_matches_transfer_route(figure_params, gt_grid):
    ric = map_trajectory(figure_params, gt_grid, route="riccati")
    tr = map_trajectory(figure_params, gt_grid, route="transfer")
    assert max_coeff_diff(ric, tr) < 1e-7


def test_weak_coupling_route_agreement():
    p = SystemParams.from_detuning(30.0, 0.0)
    t = np.linspace(0, 25, 1001)
    assert max_coeff_diff(map_trajectory(p, t, "riccati"), map_trajectory(p, t, "transfer")) < 1e-7


def test_algebraic_route_falls_back(monkeypatch):
    import cavity_esd.propagator as prop

    def boom(*args, **kwargs):
        raise RiccatiSingularityError(1.0, "k")

    monkeypatch.setattr(prop, "solve_riccati", boom)
    p = SystemParams.from_detuning(2.0, 0.0)
    t = np.linspace(0, 2, 21)
    c = prop.map_trajectory(p, t, route="algebraic")
    assert max_coeff_diff(c, transfer_map_coefficients(p, t)) == 0
    with pytest.raises(RiccatiSingularityError):
        prop.map_trajectory(p, t, route="riccati")


def test_transfer_matrix_identity_at_origin():
    s = build_transfer_matrix(SystemParams.from_detuning(2.0, 0.3), np.linspace(0, 1, 3))
    np.testing.assert_array_equal(s[0], np.eye(4))


def test_transfer_matrix_weak_coupling_limit_is_free_rotation():
    # g -> 0 with frequencies fixed in absolute units: off-diagonals rotate at omega0
    omega0 = 3.0
    p = SystemParams(omega0=omega0, omega=omega0, g=1e-9)
    t = np.linspace(0, 4, 41)
    s = build_transfer_matrix(p, t)
    np.testing.assert_allclose(s[:, 0, 0], 1, atol=1e-12)
    np.testing.assert_allclose(s[:, 3, 3], 1, atol=1e-12)
    np.testing.assert_allclose(s[:, 1, 1], np.exp(-1j * omega0 * t), atol=1e-8)
    np.testing.assert_allclose(s[:, 2, 2], np.exp(1j * omega0 * t), atol=1e-8)
    off = s.copy()
    for i in range(4):
        off[:, i, i] = 0
    assert np.max(np.abs(off)) < 1e-12


def test_transfer_matrix_equals_superoperator_of_coefficients():
    p = SystemParams.from_detuning(3.0, 0.0)
    t = np.linspace(0, 6, 61)
    np.testing.assert_allclose(
        build_transfer_matrix(p, t), superoperator(map_trajectory(p, t, "riccati")), atol=1e-7
    )


def test_transfer_columns_match_direct_integration():
    p = SystemParams.from_detuning(1.5, 0.0)
    t = np.linspace(0, 25, 251)
    s = build_transfer_matrix(p, t)
    for k in range(4):
        basis = np.zeros(4, dtype=complex)
        basis[k] = 1
        direct = tcl_direct(basis.reshape(2, 2), p, t)
        assert np.max(np.abs(direct.reshape(-1, 4) - s[:, :, k])) < 1e-8


# ---------------------------------------------------------- single qubit


def test_identity_coefficients_leave_state():
    rho = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    np.testing.assert_array_equal(propagate_single(rho, MapCoefficients.identity()), rho)


def test_ground_state_at_origin():
    c = map_trajectory(SystemParams.from_detuning(30.0, 0.0), [0.0, 1.0])
    np.testing.assert_array_equal(propagate_single(GROUND, c.at(0)), GROUND)


def test_excited_state_matches_direct_integration():
    p = SystemParams.from_detuning(30.0, 0.0)
    t = np.linspace(0, 5, 51)
    ours = propagate_single(EXCITED, map_trajectory(p, t, "algebraic"))
    direct = tcl_direct(EXCITED, p, t)
    assert np.max(np.abs(ours[-1] - direct[-1])) < 1e-7
    assert np.max(np.abs(ours - direct)) < 1e-7


def test_single_qubit_trace_and_hermiticity(figure_params, gt_grid):
    rho0 = np.array([[0.6, 0.3 + 0.2j], [0.3 - 0.2j, 0.4]])
    out = propagate_single(rho0, map_trajectory(figure_params, gt_grid))
    assert np.max(np.abs(np.trace(out, axis1=1, axis2=2) - 1)) < 1e-8
    assert np.max(np.abs(out - np.conj(np.swapaxes(out, 1, 2)))) < 1e-10


def test_trace_preservation_identities():
    # e^-Gamma (l + p) = 1 and e^-Gamma (m + n) = 1
    p = SystemParams.from_detuning(2.0, 0.0)
    c = map_trajectory(p, np.linspace(0, 25, 251), "riccati").physical()
    np.testing.assert_allclose(c["l"] + c["p"], 1, atol=1e-8)
    np.testing.assert_allclose(c["m"] + c["n"], 1, atol=1e-8)


# ----------------------------------------------------------- joint state


def test_identity_coefficients_leave_joint_state():
    rho = initial_state(InitialStateSpec.from_beta_sq("Psi", 0.3, phase=0.4))
    np.testing.assert_allclose(assemble_joint(rho, MapCoefficients.identity()), rho, atol=0)


def test_product_input_never_entangles():
    # |01><01| has no coherence and stays separable
    rho = np.zeros((4, 4), dtype=complex)
    rho[2, 2] = 1
    c = map_trajectory(SystemParams.from_detuning(1.5, 0.0), np.linspace(0, 25, 501))
    out = assemble_joint(rho, c)
    assert np.all(out[:, 1, 2] == 0) and np.all(out[:, 0, 3] == 0)
    assert all(concurrence_x(r) == 0 for r in out)


def test_joint_matches_tensor_square():
    rng = np.random.default_rng(11)
    p = SystemParams.from_detuning(3.0, 0.2)
    t = np.linspace(0, 8, 81)
    c = map_trajectory(p, t, "riccati")
    s = superoperator(c)
    for _ in range(5):
        rho = random_x_state(rng)
        assert np.max(np.abs(assemble_joint(rho, c) - apply_local_map(rho, s))) < 1e-10


def test_tensor_square_oracle_is_kron_product():
    # apply_local_map with column-stacked conventions equals a brute-force loop
    rng = np.random.default_rng(3)
    rho = random_density(rng)
    sa = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    sb = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    brute = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            for a2 in range(2):
                for b2 in range(2):
                    total = 0
                    for c in range(2):
                        for d in range(2):
                            for c2 in range(2):
                                for d2 in range(2):
                                    total += (
                                        sa[2 * a + a2, 2 * c + c2]
                                        * sb[2 * b + b2, 2 * d + d2]
                                        * rho[2 * c + d, 2 * c2 + d2]
                                    )
                    brute[2 * a + b, 2 * a2 + b2] = total
    np.testing.assert_allclose(apply_local_map(rho, sa, sb), brute, atol=1e-12)


def test_non_x_input_rejected():
    rho = np.eye(4, dtype=complex) / 4
    rho[0, 1] = rho[1, 0] = 0.1
    with pytest.raises(StructureError):
        assemble_joint(rho, MapCoefficients.identity())


def test_pipeline_identity_at_origin(figure_params):
    rho = initial_state(InitialStateSpec.from_beta_sq("Phi", 0.37, phase=1.1))
    c = map_trajectory(figure_params, [0.0, 0.5], "algebraic")
    assert np.max(np.abs(assemble_joint(rho, c)[0] - rho)) < 1e-12


def test_joint_physicality(figure_params, gt_grid):
    c = map_trajectory(figure_params, gt_grid)
    for kind in ("Phi", "Psi"):
        rho = initial_state(InitialStateSpec.from_beta_sq(kind, 0.3, phase=0.7))
        out = assemble_joint(rho, c)
        assert np.max(np.abs(np.trace(out, axis1=1, axis2=2) - 1)) < 1e-6
        assert np.max(np.abs(out - np.conj(np.swapaxes(out, 1, 2)))) < 1e-10
        assert np.max(np.abs(out[:, ~X_MASK])) < 1e-12


def test_gamma_passed_through():
    p = SystemParams.from_detuning(1.5, 0.0)
    t = np.linspace(0, 3, 4)
    c = map_trajectory(p, t, "riccati")
    np.testing.assert_array_equal(c.gamma_k, evaluate_kernels(t, p).gamma_k)
