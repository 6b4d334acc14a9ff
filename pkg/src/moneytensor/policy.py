"""The three intervention operators: stimulus, resistance cut, feedback.

Stimulus adds lambda * S to a productivity matrix; a regulatory plan
subtracts mu * Theta from a resistance matrix (floored at RESISTANCE_FLOOR
so the momentum divisions stay defined); feedback adds gamma * F to a
momentum matrix or tensor. Discrete agent actions (spending, tax cuts,
subsidies) are mapped onto those operators by action_to_plans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .momentum import MomentumMatrix
from .tensor_core import Tensor3

# Keeps adjusted resistances strictly positive: R - mu*Theta can cross zero,
# which would break every division in the momentum equations.
RESISTANCE_FLOOR = 1e-6

# Currency-to-resistance conversion for tax cuts: resistance reduction
# spread over the targeted cells sums to magnitude * TAX_CUT_KAPPA.
TAX_CUT_KAPPA = 0.01

ACTION_KINDS = ("spending", "tax_cut", "subsidy")


def _plan_matrix(values, name: str, nonnegative: bool = True) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or min(arr.shape) < 1:
        raise ValidationError(f"{name} must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    if nonnegative and not np.all(arr >= 0):
        raise ValidationError(f"{name} entries must be >= 0")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StimulusPlan:
    """Additive productivity correction: m' = m + lambda * s."""

    lam: float
    s: np.ndarray

    def __post_init__(self):
        lam = float(self.lam)
        if not math.isfinite(lam) or lam < 0:
            raise ValidationError(f"lambda must be finite and >= 0, got {lam}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "s", _plan_matrix(self.s, "stimulus matrix"))


@dataclass(frozen=True, eq=False)
class RegulatoryPlan:
    """Resistance reduction: r' = max(r - mu * theta, floor)."""

    mu: float
    theta: np.ndarray

    def __post_init__(self):
        mu = float(self.mu)
        if not math.isfinite(mu) or mu < 0:
            raise ValidationError(f"mu must be finite and >= 0, got {mu}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "theta", _plan_matrix(self.theta, "theta"))


@dataclass(frozen=True, eq=False)
class FeedbackPlan:
    """Additive momentum correction: g' = g + gamma * f.

    ``f`` is a matrix to adjust a single momentum slice or a Tensor3 to
    adjust a whole momentum tensor; gamma may be negative (damping).
    """

    gamma: float
    f: object

    def __post_init__(self):
        gamma = float(self.gamma)
        if not math.isfinite(gamma):
            raise ValidationError(f"gamma must be finite, got {gamma}")
        object.__setattr__(self, "gamma", gamma)
        if not isinstance(self.f, Tensor3):
            object.__setattr__(
                self, "f", _plan_matrix(self.f, "feedback signal", nonnegative=False)
            )


@dataclass(frozen=True)
class PolicyAction:
    """One discrete intervention: spending, tax_cut, or subsidy."""

    kind: str
    magnitude: float
    target_sectors: tuple[int, ...] = field(default_factory=tuple)
    target_agents: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ValidationError(
                f"unknown action kind {self.kind!r}; expected one of {ACTION_KINDS}"
            )
        mag = float(self.magnitude)
        if not math.isfinite(mag) or mag < 0:
            raise ValidationError(f"magnitude must be finite and >= 0, got {mag}")
        object.__setattr__(self, "magnitude", mag)
        object.__setattr__(self, "target_sectors", tuple(int(i) for i in self.target_sectors))
        object.__setattr__(self, "target_agents", tuple(int(j) for j in self.target_agents))
        if not self.target_sectors or not self.target_agents:
            raise ValidationError("action targets must be non-empty")


def apply_stimulus(m1: np.ndarray, plan: StimulusPlan) -> np.ndarray:
    """m'[i, j] = m1[i, j] + lambda * s[i, j]; the input is not modified."""
    m1 = np.asarray(m1, dtype=np.float64)
    if m1.shape != plan.s.shape:
        raise ValidationError(
            f"stimulus shape {plan.s.shape} does not match target {m1.shape}"
        )
    return m1 + plan.lam * plan.s


def adjust_resistance(r: np.ndarray, plan: RegulatoryPlan) -> np.ndarray:
    """r'[i, j] = max(r[i, j] - mu * theta[i, j], RESISTANCE_FLOOR)."""
    r = np.asarray(r, dtype=np.float64)
    if r.shape != plan.theta.shape:
        raise ValidationError(
            f"theta shape {plan.theta.shape} does not match target {r.shape}"
        )
    return np.maximum(r - plan.mu * plan.theta, RESISTANCE_FLOOR)


def apply_feedback(g, plan: FeedbackPlan):
    """g' = g + gamma * f, returning the same type as g."""
    if isinstance(g, MomentumMatrix):
        if not isinstance(plan.f, np.ndarray) or plan.f.shape != g.shape:
            raise ValidationError("feedback signal shape does not match momentum matrix")
        return MomentumMatrix(g.g + plan.gamma * plan.f)
    if isinstance(g, Tensor3):
        if not isinstance(plan.f, Tensor3) or plan.f.dims != g.dims:
            raise ValidationError("feedback signal dims do not match momentum tensor")
        return Tensor3(g.values + plan.gamma * plan.f.values)
    raise ValidationError(f"cannot apply feedback to {type(g).__name__}")


def action_to_plans(
    action: PolicyAction,
    tax,
    kappa: float = TAX_CUT_KAPPA,
) -> tuple[StimulusPlan, RegulatoryPlan]:
    """Translate a discrete action into operator plans on a taxonomy's grid.

    Spending and subsidies become a stimulus with the magnitude divided
    equally over the targeted (sector, agent) cells; tax cuts become a
    resistance reduction whose theta entries sum to magnitude * kappa
    over the same cells. The counterpart plan is always the identity.
    ``tax`` is anything exposing n_sectors and n_agents (a Taxonomy).
    """
    n_sectors, n_agents = tax.n_sectors, tax.n_agents
    shape = (n_sectors, n_agents)
    for i in action.target_sectors:
        if not 0 <= i < n_sectors:
            raise ValidationError(f"target sector index {i} out of range")
    for j in action.target_agents:
        if not 0 <= j < n_agents:
            raise ValidationError(f"target agent index {j} out of range")

    s = np.zeros(shape)
    theta = np.zeros(shape)
    n_cells = len(action.target_sectors) * len(action.target_agents)
    if action.kind in ("spending", "subsidy"):
        per_cell = action.magnitude / n_cells
    else:
        per_cell = action.magnitude * kappa / n_cells
    for i in action.target_sectors:
        for j in action.target_agents:
            if action.kind == "tax_cut":
                theta[i, j] = per_cell
            else:
                s[i, j] = per_cell
    return StimulusPlan(1.0, s), RegulatoryPlan(1.0, theta)
