"""Parameter sets behind the published concurrence surfaces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entanglement import StateKind
from .kernels import SystemParams

__all__ = ["FigureScenario", "FIGURE_IDS", "figure_scenario", "UnknownFigureError"]


class UnknownFigureError(KeyError):
    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class FigureScenario:
    id: str
    params: SystemParams
    kind: StateKind
    engine: str
    beta_sq: np.ndarray = field(repr=False)
    gt: np.ndarray = field(repr=False)
    caption: str = ""
    notes: tuple[str, ...] = ()

    def metadata(self) -> dict:
        return {
            "id": self.id,
            "state": self.kind.value,
            "engine": self.engine,
            "omega0_over_g": self.params.omega0 / self.params.g,
            "delta_over_g": self.params.delta / self.params.g,
            "caption": self.caption,
            "notes": list(self.notes),
        }


def _default_beta_sq(n: int = 50) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def _default_gt(n: int = 500, gt_max: float = 25.0) -> np.ndarray:
    return np.linspace(0.0, gt_max, n)


_CAPTION_RWA_PHI = "C_Phi and its contour for resonant case as a function of gt and beta^2 with RWA."
_CAPTION_RWA_PSI = "C_Psi and its contour as a function of gt and beta^2 with RWA."
_CAPTION_F2 = "C_Phi as a function of gt and beta^2 for delta=0. (a) omega0=1.5g, (b) omega0=3g, (c) omega0=30g."
_CAPTION_F4 = "C_Psi as a function of gt and beta^2 for delta=0. (a) omega0=2g, (b) omega0=3.5g, (c) omega0=40g."
_CAPTION_DET = (
    "Concurrence C_Psi and its contour for non-resonant case as a function of gt and beta^2 "
    "with omega0=10g, delta=0.1 omega0."
)
_NOTE_RWA = "rotating-wave concurrence does not depend on omega0 at resonance; omega0=30g is nominal"
_NOTE_DET = (
    "the captions of the two detuned figures are identical and both name C_Psi; the text discusses "
    "C_Phi and C_Psi, so Fig5 is assigned Phi and Fig6 Psi"
)

# id -> (omega0/g, delta/g, state, engine, caption, notes)
_TABLE = {
    "Fig1": (30.0, 0.0, StateKind.PHI, "jc_rwa", _CAPTION_RWA_PHI, (_NOTE_RWA,)),
    "Fig2a": (1.5, 0.0, StateKind.PHI, "tcl_algebraic", _CAPTION_F2, ()),
    "Fig2b": (3.0, 0.0, StateKind.PHI, "tcl_algebraic", _CAPTION_F2, ()),
    "Fig2c": (30.0, 0.0, StateKind.PHI, "tcl_algebraic", _CAPTION_F2, ()),
    "Fig3": (30.0, 0.0, StateKind.PSI, "jc_rwa", _CAPTION_RWA_PSI, (_NOTE_RWA,)),
    "Fig4a": (2.0, 0.0, StateKind.PSI, "tcl_algebraic", _CAPTION_F4,
              ("caption gives omega0=2g; the discussion text uses omega0=1.5g",)),
    "Fig4b": (3.5, 0.0, StateKind.PSI, "tcl_algebraic", _CAPTION_F4,
              ("caption gives omega0=3.5g; the discussion text uses omega0=3g",)),
    "Fig4c": (40.0, 0.0, StateKind.PSI, "tcl_algebraic", _CAPTION_F4,
              ("caption gives omega0=40g; the discussion text uses omega0=30g",)),
    "Fig5": (10.0, 1.0, StateKind.PHI, "tcl_algebraic", _CAPTION_DET, (_NOTE_DET,)),
    "Fig6": (10.0, 1.0, StateKind.PSI, "tcl_algebraic", _CAPTION_DET, (_NOTE_DET,)),
}

# omega0/g values quoted in the discussion text where they differ from the caption
TEXT_OMEGA0 = {"Fig4a": 1.5, "Fig4b": 3.0, "Fig4c": 30.0}

FIGURE_IDS = tuple(_TABLE)


def figure_scenario(fig_id: str, n_beta: int = 50, n_gt: int = 500, use_text_values: bool = False) -> FigureScenario:
    """Scenario for a figure id; caption values are canonical.

    ``use_text_values`` swaps in the discussion-text frequency where the two
    disagree.
    """
    try:
        omega0, delta, kind, engine, caption, notes = _TABLE[fig_id]
    except KeyError:
        raise UnknownFigureError(
            f"unknown figure id {fig_id!r}; valid ids: {', '.join(FIGURE_IDS)}"
        ) from None
    if use_text_values and fig_id in TEXT_OMEGA0:
        omega0 = TEXT_OMEGA0[fig_id]
    return FigureScenario(
        id=fig_id,
        params=SystemParams.from_detuning(omega0, delta),
        kind=kind,
        engine=engine,
        beta_sq=_default_beta_sq(n_beta),
        gt=_default_gt(n_gt),
        caption=caption,
        notes=notes,
    )
