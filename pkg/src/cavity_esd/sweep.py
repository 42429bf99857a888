"""Scenario configuration, concurrence sweeps and CSV output."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import analysis
from .entanglement import InitialStateSpec, StateKind, concurrence_general, concurrence_x_series, initial_state
from .figures import figure_scenario
from .kernels import SystemParams
from .numerics import IntegrationError
from .oracles import RabiConfig, jc_superoperator, rabi_reduced_states, rabi_single, tcl_direct_superoperator
from .propagator import (
    X_MASK,
    RiccatiSingularityError,
    apply_local_map,
    assemble_joint,
    map_trajectory,
)

log = logging.getLogger(__name__)

ENGINES = ("tcl_algebraic", "tcl_riccati", "tcl_direct", "rabi", "jc_rwa")
CSV_HEADER = ("engine", "state", "beta_sq", "gt", "concurrence", "trace_residual", "positivity_residual")


class ConfigError(ValueError):
    """Invalid scenario configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class NumericalFailure(RuntimeError):
    pass


NUMERICAL_ERRORS = (IntegrationError, RiccatiSingularityError, OverflowError, FloatingPointError, np.linalg.LinAlgError)


@dataclass(frozen=True)
class ScenarioConfig:
    state: StateKind = StateKind.PHI
    beta_sq: tuple[float, ...] = (0.5,)
    gt_start: float = 0.0
    gt_max: float = 25.0
    gt_step: float = 0.01
    omega0: float = 30.0
    delta: float = 0.0
    g: float = 1.0
    engine: str = "tcl_algebraic"
    compare: str | None = None
    out: str | None = None
    n_cut: int = 40
    phase: float = 0.0
    zero_threshold: float = analysis.ZERO_THRESHOLD
    revival_threshold: float = analysis.REVIVAL_THRESHOLD

    def __post_init__(self):
        try:
            object.__setattr__(self, "state", StateKind.parse(self.state))
        except ValueError as exc:
            raise ConfigError("state", str(exc)) from None
        object.__setattr__(self, "beta_sq", tuple(float(b) for b in self.beta_sq))
        self.validate()

    def validate(self) -> None:
        if not self.beta_sq:
            raise ConfigError("beta_sq", "grid is empty")
        if any(not 0 < b < 1 for b in self.beta_sq):
            raise ConfigError("beta_sq", "values must lie strictly between 0 and 1")
        if any(b2 <= b1 for b1, b2 in zip(self.beta_sq, self.beta_sq[1:])):
            raise ConfigError("beta_sq", "grid must be strictly ascending")
        if not self.gt_step > 0:
            raise ConfigError("gt_step", "must be positive")
        if self.gt_start < 0:
            raise ConfigError("gt_start", "must be non-negative")
        if self.gt_max < self.gt_start:
            raise ConfigError("gt_max", "must not be below gt_start")
        for name in ("engine", "compare"):
            value = getattr(self, name)
            if value is not None and value not in ENGINES:
                raise ConfigError(name, f"unknown engine {value!r}; expected one of {', '.join(ENGINES)}")
        if self.n_cut < 8:
            raise ConfigError("n_cut", "must be at least 8")
        try:
            self.params
        except ValueError as exc:
            raise ConfigError("omega0", str(exc)) from None

    @property
    def params(self) -> SystemParams:
        return SystemParams.from_detuning(self.omega0 * self.g, self.delta * self.g, self.g)

    def gt_grid(self) -> np.ndarray:
        n = int(round((self.gt_max - self.gt_start) / self.gt_step)) + 1
        return self.gt_start + self.gt_step * np.arange(n)


# ---------------------------------------------------------------- config I/O

_FLOAT_KEYS = {"gt_start", "gt_max", "gt_step", "omega0", "delta", "g", "phase", "zero_threshold", "revival_threshold"}


def parse_grid(text: str) -> tuple[float, ...]:
    """``"a,b,c"`` or inclusive ``"start:stop:step"``."""
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(round(start + i * step, 12)) for i in range(n))
    return tuple(float(v) for v in text.replace(" ", "").split(",") if v)


def config_from_mapping(values: dict, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Build a config from string or typed values; keys use ``_`` or ``-``."""
    known = {f.name for f in fields(ScenarioConfig)}
    updates = {}
    for raw_key, value in values.items():
        if value is None:
            continue
        key = raw_key.replace("-", "_")
        try:
            if key == "gt":
                start, stop, step = (float(v) for v in str(value).split(":"))
                updates.update(gt_start=start, gt_max=stop, gt_step=step)
                continue
            if key not in known:
                raise ConfigError(key, "unknown key")
            if key == "beta_sq":
                value = parse_grid(value) if isinstance(value, str) else tuple(value)
            elif key in _FLOAT_KEYS:
                value = float(value)
            elif key == "n_cut":
                value = int(value)
            elif key in ("compare", "out") and value in ("", "none"):
                value = None
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, f"cannot parse {value!r}: {exc}") from None
        updates[key] = value
    base = base or ScenarioConfig()
    return replace(base, **updates)


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    values = parse_config_text(Path(path).read_text())
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return config_from_mapping(values)


# ------------------------------------------------------------------- engines


def prepare_engine(engine: str, params: SystemParams, t_grid, n_cut: int = 40) -> Callable[[InitialStateSpec], np.ndarray]:
    """Do the per-parameter work once; return ``spec -> (T, 4, 4)`` states.

    ``t_grid`` must start at 0.
    """
    if engine in ("tcl_algebraic", "tcl_riccati"):
        route = "algebraic" if engine == "tcl_algebraic" else "riccati"
        coeffs = map_trajectory(params, t_grid, route=route)
        return lambda spec: assemble_joint(initial_state(spec), coeffs)
    if engine == "tcl_direct":
        s = tcl_direct_superoperator(params, t_grid)
        return lambda spec: apply_local_map(initial_state(spec), s)
    if engine == "jc_rwa":
        s = jc_superoperator(params, t_grid)
        return lambda spec: apply_local_map(initial_state(spec), s)
    if engine == "rabi":
        single = rabi_single(RabiConfig(params, n_cut), t_grid)
        return lambda spec: rabi_reduced_states(spec, single)
    raise ConfigError("engine", f"unknown engine {engine!r}")


def concurrence_series(rhos) -> np.ndarray:
    """Concurrence of each state; X-states take the closed form."""
    rhos = np.asarray(rhos)
    if np.all(np.abs(rhos[:, ~X_MASK]) <= 1e-12):
        return concurrence_x_series(rhos)
    return np.array([concurrence_general(r) for r in rhos])


def residuals(rhos) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-sample trace, positivity and Hermiticity residuals."""
    rhos = np.asarray(rhos)
    trace = np.abs(np.trace(rhos, axis1=1, axis2=2) - 1)
    herm = np.max(np.abs(rhos - np.conj(np.swapaxes(rhos, 1, 2))), axis=(1, 2))
    hermitian_part = (rhos + np.conj(np.swapaxes(rhos, 1, 2))) / 2
    positivity = np.clip(-np.linalg.eigvalsh(hermitian_part)[:, 0], 0.0, None)
    return trace, positivity, herm


# --------------------------------------------------------------------- sweep


@dataclass(frozen=True)
class SweepRecord:
    engine: str
    state: str
    beta_sq: float
    gt: float
    concurrence: float
    trace_residual: float
    positivity_residual: float

    def row(self) -> list[str]:
        return [self.engine, self.state] + [_fmt(v) for v in (
            self.beta_sq, self.gt, self.concurrence, self.trace_residual, self.positivity_residual)]


def _fmt(value: float) -> str:
    return f"{value:.12g}"


@dataclass
class SweepResult:
    records: list[SweepRecord]
    summary: dict = field(default_factory=dict)

    def concurrence(self, engine: str, beta_sq: float) -> np.ndarray:
        return np.array([r.concurrence for r in self.records if r.engine == engine and r.beta_sq == beta_sq])

    def times(self, engine: str, beta_sq: float) -> np.ndarray:
        return np.array([r.gt for r in self.records if r.engine == engine and r.beta_sq == beta_sq])


def worker_count() -> int:
    value = os.environ.get("ESD_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            log.warning("ignoring non-integer ESD_THREADS=%r", value)
    return os.cpu_count() or 1


def _engine_block(config: ScenarioConfig, engine: str, gt: np.ndarray):
    """Records and per-beta summaries of one engine over the full grid."""
    solve_grid = gt if gt[0] == 0.0 else np.concatenate([[0.0], gt])
    offset = solve_grid.size - gt.size
    state = config.state.value
    errors = []
    try:
        states_for = prepare_engine(engine, config.params, solve_grid, config.n_cut)
    except NUMERICAL_ERRORS as exc:
        log.error("engine %s failed: %s", engine, exc)
        errors.append({"engine": engine, "beta_sq": None, "error": str(exc)})
        states_for = None

    def one(beta_sq: float):
        nan = np.full(gt.size, np.nan)
        if states_for is None:
            return nan, nan, nan, nan, "engine setup failed"
        spec = InitialStateSpec.from_beta_sq(config.state, beta_sq, config.phase)
        try:
            rhos = states_for(spec)[offset:]
            conc = concurrence_series(rhos)
            tr, pos, herm = residuals(rhos)
            return conc, tr, pos, herm, None
        except (*NUMERICAL_ERRORS, ValueError) as exc:
            return nan, nan, nan, nan, str(exc)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(one, config.beta_sq))

    records, per_beta = [], []
    for beta_sq, (conc, tr, pos, herm, err) in zip(config.beta_sq, results):
        if err is not None and states_for is not None:
            errors.append({"engine": engine, "beta_sq": beta_sq, "error": err})
        records.extend(
            SweepRecord(engine, state, beta_sq, float(t), float(c), float(a), float(b))
            for t, c, a, b in zip(gt, conc, tr, pos)
        )
        per_beta.append(_summarize_curve(engine, beta_sq, gt, conc, tr, pos, herm, config))
    return records, per_beta, errors


def _summarize_curve(engine, beta_sq, gt, conc, tr, pos, herm, config: ScenarioConfig) -> dict:
    if np.all(np.isnan(conc)):
        return {"engine": engine, "beta_sq": beta_sq, "failed": True}
    return {
        "engine": engine,
        "beta_sq": beta_sq,
        "min_concurrence": float(np.min(conc)),
        "max_concurrence": float(np.max(conc)),
        "first_zero_gt": analysis.first_zero_time(gt, conc, config.zero_threshold),
        "revival_count": analysis.revival_count(conc, config.zero_threshold, config.revival_threshold),
        "max_trace_residual": float(np.max(tr)),
        "max_positivity_residual": float(np.max(pos)),
        "max_hermiticity_residual": float(np.max(herm)),
    }


def run_scenario(config: ScenarioConfig, write: bool = True) -> SweepResult:
    """Sweep ``config`` over its (beta_sq, gt) grid.

    Records come in deterministic order: engine, then beta_sq, then gt. When
    ``config.out`` is set and ``write`` is true the CSV is written there.
    """
    gt = config.gt_grid()
    engines = [config.engine] + ([config.compare] if config.compare and config.compare != config.engine else [])
    records, curves, errors = [], [], []
    for engine in engines:
        r, c, e = _engine_block(config, engine, gt)
        records += r
        curves += c
        errors += e

    ok = [c for c in curves if not c.get("failed")]
    summary = {
        "engines": engines,
        "state": config.state.value,
        "omega0_over_g": config.omega0,
        "delta_over_g": config.delta,
        "n_records": len(records),
        "curves": curves,
        "errors": errors,
        "min_concurrence": min((c["min_concurrence"] for c in ok), default=None),
        "max_concurrence": max((c["max_concurrence"] for c in ok), default=None),
        "max_trace_residual": max((c["max_trace_residual"] for c in ok), default=None),
        "max_positivity_residual": max((c["max_positivity_residual"] for c in ok), default=None),
        "max_hermiticity_residual": max((c["max_hermiticity_residual"] for c in ok), default=None),
    }
    if len(engines) == 2:
        a = np.array([r.concurrence for r in records if r.engine == engines[0]])
        b = np.array([r.concurrence for r in records if r.engine == engines[1]])
        summary["max_abs_diff"] = float(np.nanmax(np.abs(a - b))) if a.size else None

    result = SweepResult(records, summary)
    if write and config.out:
        write_csv(result.records, config.out)
    return result


def write_csv(records, path) -> None:
    Path(path).write_text(records_to_csv(records))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def read_csv(path) -> list[SweepRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            SweepRecord(
                row["engine"], row["state"], float(row["beta_sq"]), float(row["gt"]),
                float(row["concurrence"]), float(row["trace_residual"]), float(row["positivity_residual"]),
            )
            for row in reader
        ]


def reproduce_figure(fig_id: str, out=None, n_beta: int = 50, n_gt: int = 500, gt_max: float = 25.0) -> SweepResult:
    """Dataset for one figure; writes ``out`` and ``out + '.meta.json'`` when given."""
    scenario = figure_scenario(fig_id, n_beta=n_beta, n_gt=n_gt)
    config = ScenarioConfig(
        state=scenario.kind,
        beta_sq=tuple(scenario.beta_sq),
        gt_start=0.0,
        gt_max=gt_max,
        gt_step=gt_max / (n_gt - 1),
        omega0=scenario.params.omega0,
        delta=scenario.params.delta,
        engine=scenario.engine,
        out=str(out) if out else None,
    )
    result = run_scenario(config)
    result.summary["figure"] = scenario.metadata()
    if out:
        meta = dict(scenario.metadata(), summary=_curve_digest(result.summary))
        Path(f"{out}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return result


def _curve_digest(summary: dict) -> dict:
    keys = ("n_records", "min_concurrence", "max_concurrence", "max_trace_residual",
            "max_positivity_residual", "max_hermiticity_residual", "errors")
    return {k: summary.get(k) for k in keys}
