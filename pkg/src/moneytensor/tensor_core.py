"""Dense third-order tensor algebra for sector x agent x time money flows.

A money tensor holds currency amounts on a fixed (sector, agent, time)
axis order. The module provides construction, outer products, mode
unfoldings, and a best rank-1 approximation via alternating least
squares (higher-order power iteration), which is the analysis tool for
aggregate flow tensors.

All values are immutable after construction and every operation is a
pure function, so everything here is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

MODE_SECTOR = 0
MODE_AGENT = 1
MODE_TIME = 2

_MODE_NAMES = {MODE_SECTOR: "sector", MODE_AGENT: "agent", MODE_TIME: "time"}


def _frozen_array(values, shape=None) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if shape is not None:
        arr = arr.reshape(shape)
    else:
        arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} must be finite (no NaN/inf)")


@dataclass(frozen=True)
class Tensor3:
    """Dense third-order tensor over (sector, agent, time), row-major."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 3:
            raise ValidationError(f"tensor must have 3 axes, got {arr.ndim}")
        if min(arr.shape) < 1:
            raise ValidationError(f"all tensor dims must be >= 1, got {arr.shape}")
        _require_finite(arr, "tensor values")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_flat(cls, dims: tuple[int, int, int], flat) -> "Tensor3":
        """Build from row-major flat values; length must equal prod(dims)."""
        flat = np.asarray(flat, dtype=np.float64)
        expected = int(np.prod(dims))
        if flat.size != expected:
            raise ValidationError(
                f"expected {expected} values for dims {dims}, got {flat.size}"
            )
        return cls(flat.reshape(dims))

    @classmethod
    def zeros(cls, dims: tuple[int, int, int]) -> "Tensor3":
        if min(dims) < 1:
            raise ValidationError(f"all tensor dims must be >= 1, got {dims}")
        return cls(np.zeros(dims))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.values.shape

    @property
    def n_sectors(self) -> int:
        return self.values.shape[0]

    @property
    def n_agents(self) -> int:
        return self.values.shape[1]

    @property
    def n_periods(self) -> int:
        return self.values.shape[2]

    def total(self) -> float:
        return float(self.values.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor3):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class FactorTriple:
    """Rank-1 factors: non-negative weight and one unit vector per axis.

    Vectors are unit Euclidean norm, except the degenerate all-zero
    factors allowed only when weight is 0.
    """

    weight: float
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        w = float(self.weight)
        if not math.isfinite(w) or w < 0:
            raise ValidationError(f"weight must be finite and >= 0, got {w}")
        object.__setattr__(self, "weight", w)
        for name in ("x", "y", "z"):
            vec = _frozen_array(getattr(self, name))
            if vec.ndim != 1 or vec.size < 1:
                raise ValidationError(f"factor {name} must be a non-empty vector")
            _require_finite(vec, f"factor {name}")
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                if w != 0.0:
                    raise ValidationError(
                        f"factor {name} is zero but weight is {w}; "
                        "zero factors require weight 0"
                    )
            elif abs(norm - 1.0) > 1e-9:
                raise ValidationError(f"factor {name} must have unit norm, got {norm}")
            object.__setattr__(self, name, vec)

    def canonicalized(self) -> "FactorTriple":
        """Resolve rank-1 sign ambiguity to a unique representative.

        First nonzero entry of x is made positive (compensating through y),
        then likewise for y (compensating through z); the reconstruction
        weight * x (x) y (x) z is unchanged.
        """
        x, y, z = self.x.copy(), self.y.copy(), self.z.copy()
        if _first_nonzero_sign(x) < 0:
            x, y = -x, -y
        if _first_nonzero_sign(y) < 0:
            y, z = -y, -z
        return FactorTriple(self.weight, x, y, z)


def _first_nonzero_sign(vec: np.ndarray) -> int:
    for v in vec:
        if v != 0.0:
            return 1 if v > 0 else -1
    return 0


@dataclass(frozen=True)
class AlsConfig:
    """Stopping rule and seed for the rank-1 decomposition.

    ``tol`` is a relative residual-change threshold: iteration stops once
    the Frobenius residual moves by at most tol * ||t||_F between sweeps.
    The seed is reserved for randomized restarts; the default
    initialization is the deterministic SVD-based one and ignores it.
    """

    max_iters: int = 200
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (self.tol > 0):
            raise ValidationError(f"tol must be > 0, got {self.tol}")


def outer_product3(x, y, z) -> Tensor3:
    """Tensor with entries x[i] * y[j] * z[k]."""
    vecs = []
    for name, v in (("x", x), ("y", y), ("z", z)):
        v = np.asarray(v, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError(f"{name} must be a non-empty vector")
        _require_finite(v, name)
        vecs.append(v)
    x, y, z = vecs
    return Tensor3(np.einsum("i,j,k->ijk", x, y, z))


def reconstruct(f: FactorTriple) -> Tensor3:
    """Dense tensor weight * x (x) y (x) z."""
    return Tensor3(f.weight * np.einsum("i,j,k->ijk", f.x, f.y, f.z))


def frobenius_norm(t: Tensor3) -> float:
    return float(np.linalg.norm(t.values))


def mode_unfold(t: Tensor3, mode: int) -> np.ndarray:
    """Matricize along one axis.

    Rows index the chosen axis; columns run over the remaining axes in
    canonical (sector, agent, time) order, last axis fastest. E.g. for
    the agent mode the columns are ordered (sector, time) with time
    varying fastest.
    """
    if mode not in _MODE_NAMES:
        raise ValidationError(f"mode must be one of {sorted(_MODE_NAMES)}, got {mode}")
    n = t.dims[mode]
    return np.moveaxis(t.values, mode, 0).reshape(n, -1).copy()


def contract_time(t: Tensor3) -> np.ndarray:
    """Sum over the time axis: out[i, j] = sum_k t[i, j, k]."""
    return t.values.sum(axis=2)


def rank1_approx(t: Tensor3, cfg: AlsConfig = AlsConfig()) -> tuple[FactorTriple, float]:
    """Best rank-1 approximation by alternating least squares.

    Factors are initialized from the leading singular vectors of the
    three mode unfoldings (deterministic), then each factor is updated
    in turn by the tensor contraction against the other two; the weight
    is the inner product <t, x(x)y(x)z>. Returns the sign-normalized
    factors and the Frobenius residual ||t - weight * x(x)y(x)z||_F at
    termination. The zero tensor short-circuits to weight 0, residual 0.
    """
    factors, residual, _ = _rank1_als(t, cfg)
    return factors, residual


def rank1_history(t: Tensor3, cfg: AlsConfig = AlsConfig()) -> list[float]:
    """Per-sweep residuals from the same iteration as rank1_approx."""
    _, _, history = _rank1_als(t, cfg)
    return history


def _rank1_als(t: Tensor3, cfg: AlsConfig) -> tuple[FactorTriple, float, list[float]]:
    values = t.values
    t_norm = float(np.linalg.norm(values))
    if t_norm == 0.0:
        dims = t.dims
        zero = FactorTriple(
            0.0, np.zeros(dims[0]), np.zeros(dims[1]), np.zeros(dims[2])
        )
        return zero, 0.0, [0.0]

    x = _leading_singular_vector(mode_unfold(t, MODE_SECTOR))
    y = _leading_singular_vector(mode_unfold(t, MODE_AGENT))
    z = _leading_singular_vector(mode_unfold(t, MODE_TIME))

    weight = float(np.einsum("ijk,i,j,k->", values, x, y, z))
    residual = _residual(values, weight, x, y, z)
    history = [residual]

    for _ in range(cfg.max_iters):
        x = _normalized(np.einsum("ijk,j,k->i", values, y, z), fallback=x)
        y = _normalized(np.einsum("ijk,i,k->j", values, x, z), fallback=y)
        z = _normalized(np.einsum("ijk,i,j->k", values, x, y), fallback=z)
        weight = float(np.einsum("ijk,i,j,k->", values, x, y, z))
        new_residual = _residual(values, weight, x, y, z)
        history.append(new_residual)
        done = abs(residual - new_residual) <= cfg.tol * t_norm
        residual = new_residual
        if done:
            break

    if weight < 0:
        weight, x = -weight, -x
    factors = FactorTriple(weight, x, y, z).canonicalized()
    residual = _residual(values, factors.weight, factors.x, factors.y, factors.z)
    return factors, residual, history


def _residual(values: np.ndarray, weight: float, x, y, z) -> float:
    approx = weight * np.einsum("i,j,k->ijk", x, y, z)
    return float(np.linalg.norm(values - approx))


def _normalized(vec: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    # A zero contraction means the current iterate is orthogonal to the
    # tensor along this mode; keep the previous direction rather than
    # dividing by zero.
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return fallback
    return vec / norm


def _leading_singular_vector(matrix: np.ndarray) -> np.ndarray:
    u, _, _ = np.linalg.svd(matrix, full_matrices=False)
    lead = u[:, 0]
    if _first_nonzero_sign(lead) < 0:
        lead = -lead
    return lead
