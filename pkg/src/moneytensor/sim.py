"""Discrete-time economy simulator emitting six indicator series.

Each step transforms the momentum inputs in a fixed order: scenario
shocks, then policy interventions, then the momentum slice, then
optional feedback, then indicator derivation, and finally the natural
productivity drift m1 *= (1 + g_star). Everything is driven by the
deterministic generator in rng.py, so identical configurations produce
bit-identical series; noise draws happen in a fixed order (inflation
first, then unemployment) every step regardless of noise_sd.

State values are immutable; one step() call at a time should be in
flight per logical session, but distinct sessions are independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .ledger import Taxonomy
from .momentum import MomentumInputs, MomentumMatrix, aggregate_resistance, momentum_slice
from .policy import (
    FeedbackPlan,
    PolicyAction,
    action_to_plans,
    adjust_resistance,
    apply_feedback,
    apply_stimulus,
)
from .rng import Xoshiro256StarStar

# Floor on the GDP-growth denominator; a zero-momentum economy otherwise
# divides by zero on its first move.
GROWTH_EPS = 1e-9

SHOCK_KINDS = ("financial_crisis", "pandemic", "green_transition")

# Pandemic productivity loss saturates on service sectors.
PANDEMIC_MAX_SERVICE_LOSS = 0.95


@dataclass(frozen=True)
class IndicatorParams:
    """Closed-form indicator model parameters."""

    g_star: float = 0.02
    pi_star: float = 0.02
    okun_b: float = 0.3
    u0: float = 0.05
    u_min: float = 0.005
    u_max: float = 0.25
    export_sectors: tuple[int, ...] = ()
    import_propensity: float = 0.0
    noise_sd: float = 0.0

    def __post_init__(self):
        for name in ("g_star", "pi_star", "okun_b", "u0", "u_min", "u_max",
                     "import_propensity", "noise_sd"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.g_star <= -1.0:
            raise ValidationError("g_star must be > -1 (drift factor must stay positive)")
        if self.okun_b < 0:
            raise ValidationError("okun_b must be >= 0")
        if not (0.0 <= self.u_min < self.u0 < self.u_max <= 1.0):
            raise ValidationError(
                "unemployment bounds must satisfy 0 <= u_min < u0 < u_max <= 1"
            )
        if not (0.0 <= self.import_propensity <= 1.0):
            raise ValidationError("import_propensity must be in [0, 1]")
        if self.noise_sd < 0:
            raise ValidationError("noise_sd must be >= 0")
        object.__setattr__(
            self, "export_sectors", tuple(int(i) for i in self.export_sectors)
        )


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce a run: taxonomy, matrices, knobs, seed."""

    taxonomy: Taxonomy
    beta: float
    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    indicators: IndicatorParams
    seed: int
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValidationError(f"steps must be >= 1, got {self.steps}")
        inputs = MomentumInputs(self.m1, self.m2, self.m3, self.r1, self.r2, self.beta)
        expected = (self.taxonomy.n_sectors, self.taxonomy.n_agents)
        if inputs.shape != expected:
            raise ValidationError(
                f"matrix shape {inputs.shape} does not match taxonomy grid {expected}"
            )
        for name in ("m1", "m2", "m3", "r1", "r2"):
            object.__setattr__(self, name, getattr(inputs, name))
        object.__setattr__(self, "beta", inputs.beta)
        object.__setattr__(self, "seed", int(self.seed))
        for i in self.indicators.export_sectors:
            if not 0 <= i < self.taxonomy.n_sectors:
                raise ValidationError(f"export sector index {i} out of range")

    def initial_inputs(self) -> MomentumInputs:
        return MomentumInputs(self.m1, self.m2, self.m3, self.r1, self.r2, self.beta)


@dataclass(frozen=True)
class EconomyState:
    """Evolving simulation state threaded through step()."""

    step: int
    inputs: MomentumInputs
    g_prev_total: float
    u_prev: float
    rng_state: tuple


@dataclass(frozen=True)
class IndicatorFrame:
    """One step's six reported indicators."""

    step: int
    gdp_growth: float
    inflation: float
    unemployment: float
    trade_balance: float
    economic_resistance: float
    actions: tuple[PolicyAction, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for name in ("gdp_growth", "inflation", "unemployment",
                     "trade_balance", "economic_resistance"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if not (0.0 <= self.unemployment <= 1.0):
            raise ValidationError("unemployment must be within [0, 1]")
        if self.economic_resistance <= 0:
            raise ValidationError("economic_resistance must be > 0")
        object.__setattr__(self, "actions", tuple(self.actions))


@dataclass(frozen=True)
class Shock:
    """Scheduled scenario perturbation active on steps [start, start+duration)."""

    kind: str
    start_step: int
    duration: int
    severity: float

    def __post_init__(self):
        if self.kind not in SHOCK_KINDS:
            raise ValidationError(
                f"unknown shock kind {self.kind!r}; expected one of {SHOCK_KINDS}"
            )
        if self.start_step < 0:
            raise ValidationError("start_step must be >= 0")
        if self.duration < 1:
            raise ValidationError("duration must be >= 1")
        severity = float(self.severity)
        if not math.isfinite(severity) or severity < 0:
            raise ValidationError(f"severity must be finite and >= 0, got {severity}")
        object.__setattr__(self, "severity", severity)

    def active_at(self, step: int) -> bool:
        return self.start_step <= step < self.start_step + self.duration


def init_state(cfg: SimConfig) -> EconomyState:
    """Step-0 state: initial matrices, u0, and the seeded generator."""
    inputs = cfg.initial_inputs()
    return EconomyState(
        step=0,
        inputs=inputs,
        g_prev_total=momentum_slice(inputs).total(),
        u_prev=cfg.indicators.u0,
        rng_state=Xoshiro256StarStar(cfg.seed).getstate(),
    )


def apply_shock(inputs: MomentumInputs, shock: Shock, cfg: SimConfig) -> MomentumInputs:
    """One active step's worth of a shock, compounding while it lasts.

    financial_crisis scales both resistances by (1 + severity);
    pandemic scales m1 down, hardest on service-tagged sectors;
    green_transition moves a severity/duration fraction of brown-sector
    m1 mass to green sectors within each agent column (mass conserved).
    """
    s = shock.severity
    if shock.kind == "financial_crisis":
        return inputs.replace(r1=inputs.r1 * (1.0 + s), r2=inputs.r2 * (1.0 + s))
    if shock.kind == "pandemic":
        service = cfg.taxonomy.sectors_tagged("service")
        factors = np.full(inputs.shape[0], 1.0 - s / 2.0)
        for i in service:
            factors[i] = 1.0 - min(s, PANDEMIC_MAX_SERVICE_LOSS)
        return inputs.replace(m1=inputs.m1 * factors[:, np.newaxis])
    # green_transition
    brown = cfg.taxonomy.sectors_tagged("brown")
    green = cfg.taxonomy.sectors_tagged("green")
    if not brown or not green or s == 0.0:
        return inputs
    fraction = min(s / shock.duration, 1.0)
    m1 = inputs.m1.copy()
    brown_rows = np.array(brown)
    moved = fraction * m1[brown_rows, :].sum(axis=0)
    m1[brown_rows, :] *= 1.0 - fraction
    for i in green:
        m1[i, :] += moved / len(green)
    return inputs.replace(m1=m1)


def derive_indicators(
    prev_total: float,
    u_prev: float,
    g: MomentumMatrix,
    inputs: MomentumInputs,
    cfg: SimConfig,
    rng: Xoshiro256StarStar,
) -> dict:
    """Closed-form indicator values for one step.

    gdp_growth is the relative change of total momentum; inflation is a
    demand-pull offset from baseline; unemployment follows an Okun-style
    response; trade balance is export-sector momentum minus an import
    share of all positive momentum. Noise is drawn inflation-first.
    """
    p = cfg.indicators
    total = g.total()
    gdp_growth = (total - prev_total) / max(abs(prev_total), GROWTH_EPS)
    inflation_noise = rng.normal() * p.noise_sd
    unemployment_noise = rng.normal() * p.noise_sd
    inflation = p.pi_star + 0.5 * (gdp_growth - p.g_star) + inflation_noise
    unemployment = min(
        max(u_prev - p.okun_b * (gdp_growth - p.g_star) + unemployment_noise, p.u_min),
        p.u_max,
    )
    exports = float(g.g[list(p.export_sectors), :].sum()) if p.export_sectors else 0.0
    positive_momentum = float(np.maximum(g.g, 0.0).sum())
    trade_balance = exports - p.import_propensity * positive_momentum
    return {
        "gdp_growth": gdp_growth,
        "inflation": inflation,
        "unemployment": unemployment,
        "trade_balance": trade_balance,
        "economic_resistance": aggregate_resistance(inputs),
    }


def step(
    cfg: SimConfig,
    state: EconomyState,
    interventions=(),
    feedback: FeedbackPlan | None = None,
    shocks_active=(),
) -> tuple[EconomyState, IndicatorFrame]:
    """Advance one step; returns the new state and the step's frame."""
    inputs = state.inputs
    for shock in shocks_active:
        inputs = apply_shock(inputs, shock, cfg)
    interventions = tuple(interventions)
    for action in interventions:
        stimulus, regulatory = action_to_plans(action, cfg.taxonomy)
        inputs = inputs.replace(
            m1=apply_stimulus(inputs.m1, stimulus),
            r1=adjust_resistance(inputs.r1, regulatory),
        )
    g = momentum_slice(inputs)
    if feedback is not None:
        g = apply_feedback(g, feedback)
    rng = Xoshiro256StarStar.from_state(state.rng_state)
    indicators = derive_indicators(state.g_prev_total, state.u_prev, g, inputs, cfg, rng)
    frame = IndicatorFrame(step=state.step, actions=interventions, **indicators)
    drifted = inputs.replace(m1=inputs.m1 * (1.0 + cfg.indicators.g_star))
    next_state = EconomyState(
        step=state.step + 1,
        inputs=drifted,
        g_prev_total=g.total(),
        u_prev=frame.unemployment,
        rng_state=rng.getstate(),
    )
    return next_state, frame


def uniform_feedback(gamma: float, shape: tuple[int, int]) -> FeedbackPlan:
    """Gamma-only feedback surface: a flat unit signal over the grid.

    Used by the HTTP API, whose step endpoint accepts a bare gamma; the
    resulting plan shifts every momentum cell by gamma.
    """
    return FeedbackPlan(gamma, np.ones(shape))


def run(cfg: SimConfig, shocks=(), schedule=None) -> list[IndicatorFrame]:
    """Full batch run: cfg.steps frames under the shocks and schedule.

    ``schedule`` maps a step index to the interventions applied there.
    """
    schedule = schedule or {}
    shocks = tuple(shocks)
    state = init_state(cfg)
    frames = []
    for k in range(cfg.steps):
        active = [s for s in shocks if s.active_at(k)]
        state, frame = step(cfg, state, schedule.get(k, ()), None, active)
        frames.append(frame)
    return frames
