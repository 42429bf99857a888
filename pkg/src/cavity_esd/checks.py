"""Oracle cross-validation suite behind the ``check`` subcommand."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .entanglement import InitialStateSpec, concurrence_general, concurrence_x
from .figures import FIGURE_IDS, figure_scenario
from .kernels import SystemParams, evaluate_kernels
from .oracles import RabiConfig, jc_reference, rabi_joint, truncation_residual
from .sweep import ScenarioConfig, run_scenario


@dataclass
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    seconds: float

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<46} {self.value:<12.3g} tol {self.tolerance:<8.1g} {self.seconds:6.2f}s"


def _route_equivalence(fig_id: str) -> float:
    sc = figure_scenario(fig_id)
    config = ScenarioConfig(
        state=sc.kind, beta_sq=tuple(np.round(np.arange(0.1, 0.95, 0.1), 12)),
        gt_max=25.0, gt_step=0.05, omega0=sc.params.omega0, delta=sc.params.delta,
        engine="tcl_algebraic", compare="tcl_direct",
    )
    return run_scenario(config, write=False).summary["max_abs_diff"]


def _kernel_quadrature() -> float:
    worst = 0.0
    for omega0, delta in ((1.5, 0.0), (10.0, 1.0)):
        p = SystemParams.from_detuning(omega0, delta)
        for t in np.linspace(0.5, 25.0, 12):
            k = evaluate_kernels(t, p)
            for fn, target in (("alpha", k.alpha_tilde), ("f", k.F_int)):
                def integrand(s, part):
                    return getattr(getattr(evaluate_kernels(s, p), fn), part)
                re = quad(integrand, 0, t, args=("real",), limit=400, epsabs=1e-13, epsrel=1e-13)[0]
                im = quad(integrand, 0, t, args=("imag",), limit=400, epsabs=1e-13, epsrel=1e-13)[0]
                worst = max(worst, abs(complex(re, im) - target))
    return worst


def _jc_closed_form() -> float:
    p = SystemParams.from_detuning(30.0, 0.0)
    t = np.linspace(0, np.pi, 201)
    worst = 0.0
    for b2 in (0.2, 0.5, 0.8):
        spec = InitialStateSpec.from_beta_sq("Phi", b2)
        series = jc_reference(spec, p, t)
        expected = spec.initial_concurrence * np.cos(t) ** 2
        worst = max(worst, float(np.max(np.abs(series.values - expected))))
    return worst


def _x_vs_general() -> float:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        d = rng.dirichlet(np.ones(4))
        a = rng.uniform(0, 1) * np.sqrt(d[0] * d[3]) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        b = rng.uniform(0, 1) * np.sqrt(d[1] * d[2]) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        rho = np.diag(d).astype(complex)
        rho[0, 3], rho[3, 0] = a, np.conj(a)
        rho[1, 2], rho[2, 1] = b, np.conj(b)
        worst = max(worst, abs(concurrence_x(rho) - concurrence_general(rho)))
    return worst


def _rabi_truncation() -> float:
    t = np.linspace(0, 10, 101)
    return truncation_residual(RabiConfig(SystemParams.from_detuning(30.0, 0.0), 30), t, n_other=50)


def _rabi_weak_coupling() -> float:
    t = np.linspace(0, 10, 201)
    spec = InitialStateSpec.from_beta_sq("Phi", 0.5)
    p = SystemParams.from_detuning(30.0, 0.0)
    _, rabi = rabi_joint(spec, RabiConfig(p, 40), t, check_truncation=False)
    tcl = run_scenario(
        ScenarioConfig(state="Phi", beta_sq=(0.5,), gt_max=10.0, gt_step=0.05, omega0=30.0), write=False
    )
    return float(np.max(np.abs(rabi.values - tcl.concurrence("tcl_algebraic", 0.5))))


def all_checks() -> list[tuple[str, Callable[[], float], float]]:
    checks = [
        (f"route equivalence {fid} (algebraic vs direct)", lambda fid=fid: _route_equivalence(fid), 1e-6)
        for fid in FIGURE_IDS
        if figure_scenario(fid).engine == "tcl_algebraic"
    ]
    checks += [
        ("kernel integrals vs quadrature", _kernel_quadrature, 1e-9),
        ("JC concurrence vs 2 beta |eta| cos^2(gt)", _jc_closed_form, 1e-10),
        ("X-state vs general concurrence", _x_vs_general, 1e-8),
        ("Rabi truncation residual (30 vs 50)", _rabi_truncation, 1e-6),
        ("Rabi vs TCL concurrence, omega0=30g", _rabi_weak_coupling, 0.05),
    ]
    return checks


def run_checks(echo: Callable[[str], None] | None = print) -> list[CheckResult]:
    results = []
    for name, fn, tol in all_checks():
        start = time.perf_counter()
        value = float(fn())
        res = CheckResult(name, value, tol, bool(value < tol), time.perf_counter() - start)
        results.append(res)
        if echo:
            echo(res.line())
    return results
