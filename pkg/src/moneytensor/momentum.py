"""Amplifier-style momentum model on the sector x agent grid.

Momentum is the "current" of the transistor analogy: input-side
productivity divided by input resistance, minus output-side
productivity divided by output resistance, scaled by the amplification
factor beta. The scalar form gives an aggregate GDP reading; the
elementwise form gives a per-cell momentum matrix, and a sequence of
those stacks into a momentum tensor over simulation steps.

All five matrices of MomentumInputs live on one common sector x agent
grid: m1/r1 are the input side of the amplifier, m2, m3 and r2 the
output side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .tensor_core import Tensor3, contract_time


@dataclass(frozen=True)
class AmplifierParams:
    """Scalar amplifier: beta, three productivity levels, two resistances."""

    beta: float
    p1: float
    p2: float
    p3: float
    r_in: float
    r_out: float

    def __post_init__(self):
        for name in ("beta", "p1", "p2", "p3", "r_in", "r_out"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.beta <= 0:
            raise ValidationError(f"beta must be > 0, got {self.beta}")
        for name in ("p1", "p2", "p3"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if self.r_in <= 0 or self.r_out <= 0:
            raise ValidationError("resistances r_in and r_out must be > 0")


def _matrix(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or min(arr.shape) < 1:
        raise ValidationError(f"{name} must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite (no NaN/inf)")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MomentumInputs:
    """Productivity layers m1..m3 and resistances r1, r2 on one grid."""

    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    beta: float

    def __post_init__(self):
        shape = None
        for name in ("m1", "m2", "m3", "r1", "r2"):
            arr = _matrix(getattr(self, name), name)
            if shape is None:
                shape = arr.shape
            elif arr.shape != shape:
                raise ValidationError(
                    f"{name} shape {arr.shape} != expected {shape}; "
                    "all momentum matrices must share one shape"
                )
            object.__setattr__(self, name, arr)
        for name in ("r1", "r2"):
            if not np.all(getattr(self, name) > 0):
                raise ValidationError(f"{name} entries must be strictly positive")
        beta = float(self.beta)
        if not math.isfinite(beta):
            raise ValidationError(f"beta must be finite, got {beta}")
        object.__setattr__(self, "beta", beta)

    @property
    def shape(self) -> tuple[int, int]:
        return self.m1.shape

    def replace(self, **kwargs) -> "MomentumInputs":
        fields = {n: getattr(self, n) for n in ("m1", "m2", "m3", "r1", "r2", "beta")}
        fields.update(kwargs)
        return MomentumInputs(**fields)


@dataclass(frozen=True, eq=False)
class MomentumMatrix:
    """Per-cell momentum g on the sector x agent grid."""

    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g", _matrix(self.g, "g"))

    @property
    def shape(self) -> tuple[int, int]:
        return self.g.shape

    def total(self) -> float:
        return float(self.g.sum())


def gdp_amplifier(p: AmplifierParams) -> float:
    """Aggregate output: beta * (p1/r_in - (p2 + p3)/r_out)."""
    return p.beta * (p.p1 / p.r_in - (p.p2 + p.p3) / p.r_out)


def momentum_slice(inp: MomentumInputs) -> MomentumMatrix:
    """Elementwise amplifier: g = beta * (m1/r1 - (m2 + m3)/r2)."""
    g = inp.beta * (inp.m1 / inp.r1 - (inp.m2 + inp.m3) / inp.r2)
    return MomentumMatrix(g)


def momentum_tensor(per_step_inputs) -> Tensor3:
    """Stack one momentum slice per step along the time axis."""
    per_step_inputs = list(per_step_inputs)
    if not per_step_inputs:
        raise ValidationError("per_step_inputs must be non-empty")
    shape = per_step_inputs[0].shape
    for k, inp in enumerate(per_step_inputs):
        if inp.shape != shape:
            raise ValidationError(
                f"per_step_inputs[{k}] shape {inp.shape} != expected {shape}"
            )
    slices = [momentum_slice(inp).g for inp in per_step_inputs]
    return Tensor3(np.stack(slices, axis=2))


def momentum_matrix_from_flows(t: Tensor3) -> MomentumMatrix:
    """Average flow rate per period: g[i, j] = sum_k t[i, j, k] / n_periods."""
    return MomentumMatrix(contract_time(t) / t.n_periods)


def aggregate_resistance(inp: MomentumInputs) -> float:
    """Single economy-wide resistance reading: mean of all r1 and r2 entries."""
    stacked = np.concatenate([inp.r1.ravel(), inp.r2.ravel()])
    return float(stacked.mean())
