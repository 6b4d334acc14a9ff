"""Amplifier equations against loop-based hand oracles."""

import numpy as np
import pytest

from moneytensor.errors import ValidationError
from moneytensor.momentum import (
    AmplifierParams,
    MomentumInputs,
    aggregate_resistance,
    gdp_amplifier,
    momentum_matrix_from_flows,
    momentum_slice,
    momentum_tensor,
)
from moneytensor.tensor_core import Tensor3

from oracles import gdp_formula, momentum_entries


def make_inputs(m1, m2, m3, r1, r2, beta=1.0) -> MomentumInputs:
    return MomentumInputs(
        m1=np.asarray(m1, dtype=float),
        m2=np.asarray(m2, dtype=float),
        m3=np.asarray(m3, dtype=float),
        r1=np.asarray(r1, dtype=float),
        r2=np.asarray(r2, dtype=float),
        beta=beta,
    )


def random_inputs(rng, shape=(3, 2), beta=None) -> MomentumInputs:
    beta = float(rng.uniform(0.2, 3.0)) if beta is None else beta
    return make_inputs(
        rng.uniform(0.0, 10.0, shape),
        rng.uniform(0.0, 5.0, shape),
        rng.uniform(0.0, 5.0, shape),
        rng.uniform(0.1, 4.0, shape),
        rng.uniform(0.1, 4.0, shape),
        beta,
    )


# --- validation -----------------------------------------------------------------

def test_amplifier_params_invariants():
    with pytest.raises(ValidationError):
        AmplifierParams(beta=1.0, p1=1.0, p2=0.0, p3=0.0, r_in=0.0, r_out=1.0)
    with pytest.raises(ValidationError):
        AmplifierParams(beta=0.0, p1=1.0, p2=0.0, p3=0.0, r_in=1.0, r_out=1.0)
    with pytest.raises(ValidationError):
        AmplifierParams(beta=1.0, p1=-1.0, p2=0.0, p3=0.0, r_in=1.0, r_out=1.0)


def test_momentum_inputs_shape_mismatch():
    with pytest.raises(ValidationError):
        make_inputs([[1.0]], [[1.0]], [[1.0]], [[1.0, 1.0]], [[1.0]])


def test_momentum_inputs_resistance_positive():
    with pytest.raises(ValidationError):
        make_inputs([[1.0]], [[1.0]], [[1.0]], [[0.0]], [[1.0]])


# --- gdp_amplifier --------------------------------------------------------------

def test_gdp_identity_case():
    p = AmplifierParams(beta=1.0, p1=1.0, p2=0.0, p3=0.0, r_in=1.0, r_out=1.0)
    assert gdp_amplifier(p) == 1.0


def test_gdp_balance_point_is_zero():
    p = AmplifierParams(beta=2.0, p1=4.0, p2=1.0, p3=1.0, r_in=2.0, r_out=1.0)
    assert gdp_amplifier(p) == 0.0


def test_gdp_hand_example():
    p = AmplifierParams(beta=2.0, p1=10.0, p2=3.0, p3=1.0, r_in=2.0, r_out=4.0)
    assert gdp_amplifier(p) == 8.0


def test_gdp_matches_formula_oracle():
    rng = np.random.default_rng(31)
    for _ in range(30):
        beta = rng.uniform(0.1, 5.0)
        p1, p2, p3 = rng.uniform(0.0, 10.0, 3)
        r_in, r_out = rng.uniform(0.1, 5.0, 2)
        p = AmplifierParams(beta=beta, p1=p1, p2=p2, p3=p3, r_in=r_in, r_out=r_out)
        assert gdp_amplifier(p) == pytest.approx(
            gdp_formula(beta, p1, p2, p3, r_in, r_out), rel=1e-12
        )


def test_gdp_is_1x1_momentum_special_case():
    rng = np.random.default_rng(32)
    for _ in range(10):
        beta = rng.uniform(0.1, 3.0)
        p1, p2, p3 = rng.uniform(0.0, 10.0, 3)
        r_in, r_out = rng.uniform(0.1, 5.0, 2)
        scalar = gdp_amplifier(
            AmplifierParams(beta=beta, p1=p1, p2=p2, p3=p3, r_in=r_in, r_out=r_out)
        )
        grid = momentum_slice(
            make_inputs([[p1]], [[p2]], [[p3]], [[r_in]], [[r_out]], beta)
        )
        assert grid.g[0, 0] == scalar


# --- momentum_slice -------------------------------------------------------------

def test_slice_zero_beta():
    inp = make_inputs([[1.0, 2.0]], [[1.0, 1.0]], [[1.0, 1.0]], [[1.0, 1.0]], [[1.0, 1.0]], 0.0)
    assert np.all(momentum_slice(inp).g == 0.0)


def test_slice_all_ones_gives_minus_one():
    ones = np.ones((2, 2))
    inp = MomentumInputs(ones, ones, ones, ones, ones, 1.0)
    assert np.all(momentum_slice(inp).g == -1.0)


def test_slice_input_side_only():
    shape = (2, 3)
    inp = make_inputs(
        np.full(shape, 4.0), np.zeros(shape), np.zeros(shape),
        np.full(shape, 2.0), np.ones(shape), 1.0,
    )
    assert np.all(momentum_slice(inp).g == 2.0)


def test_slice_matches_loop_oracle():
    rng = np.random.default_rng(33)
    for _ in range(30):
        inp = random_inputs(rng)
        expected = momentum_entries(
            inp.m1.tolist(), inp.m2.tolist(), inp.m3.tolist(),
            inp.r1.tolist(), inp.r2.tolist(), inp.beta,
        )
        assert np.allclose(momentum_slice(inp).g, expected, rtol=1e-12, atol=0.0)


def test_slice_beta_homogeneity_exact():
    rng = np.random.default_rng(34)
    for _ in range(20):
        inp = random_inputs(rng, beta=1.0)
        c = float(rng.uniform(0.5, 4.0))
        scaled = momentum_slice(inp.replace(beta=c)).g
        base = momentum_slice(inp).g
        assert np.allclose(scaled, c * base, rtol=1e-12, atol=0.0)


def test_slice_sign_structure():
    rng = np.random.default_rng(35)
    shape = (3, 3)
    only_input = make_inputs(
        rng.uniform(0, 5, shape), np.zeros(shape), np.zeros(shape),
        rng.uniform(0.1, 2, shape), rng.uniform(0.1, 2, shape), 1.5,
    )
    assert np.all(momentum_slice(only_input).g >= 0.0)
    only_output = make_inputs(
        np.zeros(shape), rng.uniform(0, 5, shape), rng.uniform(0, 5, shape),
        rng.uniform(0.1, 2, shape), rng.uniform(0.1, 2, shape), 1.5,
    )
    assert np.all(momentum_slice(only_output).g <= 0.0)


# --- momentum_tensor ------------------------------------------------------------

def test_tensor_single_input():
    rng = np.random.default_rng(36)
    inp = random_inputs(rng)
    t = momentum_tensor([inp])
    assert t.n_periods == 1
    assert np.array_equal(t.values[:, :, 0], momentum_slice(inp).g)


def test_tensor_identical_inputs_identical_slices():
    rng = np.random.default_rng(37)
    inp = random_inputs(rng)
    t = momentum_tensor([inp, inp])
    assert np.array_equal(t.values[:, :, 0], t.values[:, :, 1])


def test_tensor_beta_doubling_doubles_slice():
    rng = np.random.default_rng(38)
    inp = random_inputs(rng, beta=1.0)
    t = momentum_tensor([inp, inp.replace(beta=2.0)])
    assert np.allclose(t.values[:, :, 1], 2.0 * t.values[:, :, 0], rtol=1e-12)


def test_tensor_slices_bit_exact():
    rng = np.random.default_rng(39)
    inputs = [random_inputs(rng) for _ in range(4)]
    t = momentum_tensor(inputs)
    for k, inp in enumerate(inputs):
        assert np.array_equal(t.values[:, :, k], momentum_slice(inp).g)


def test_tensor_rejects_empty_and_mixed_shapes():
    rng = np.random.default_rng(40)
    with pytest.raises(ValidationError):
        momentum_tensor([])
    with pytest.raises(ValidationError):
        momentum_tensor([random_inputs(rng, (2, 2)), random_inputs(rng, (3, 2))])


# --- momentum_matrix_from_flows -------------------------------------------------

def test_flows_zero_tensor():
    assert np.all(momentum_matrix_from_flows(Tensor3.zeros((2, 3, 4))).g == 0.0)


def test_flows_single_period_equals_slice():
    rng = np.random.default_rng(41)
    values = rng.normal(size=(2, 2, 1))
    assert np.array_equal(momentum_matrix_from_flows(Tensor3(values)).g, values[:, :, 0])


def test_flows_hand_average():
    t = Tensor3(np.array([[[4.0, 6.0]]]))
    assert momentum_matrix_from_flows(t).g[0, 0] == 5.0


def test_flows_commute_with_scaling():
    rng = np.random.default_rng(42)
    values = rng.normal(size=(3, 2, 5))
    c = 3.7
    scaled = momentum_matrix_from_flows(Tensor3(c * values)).g
    base = momentum_matrix_from_flows(Tensor3(values)).g
    assert np.allclose(scaled, c * base, rtol=1e-12, atol=1e-15)


# --- aggregate_resistance -------------------------------------------------------

def test_resistance_all_ones():
    ones = np.ones((2, 3))
    inp = MomentumInputs(ones, ones, ones, ones, ones, 1.0)
    assert aggregate_resistance(inp) == 1.0


def test_resistance_two_and_four_mean_three():
    shape = (2, 2)
    inp = make_inputs(
        np.ones(shape), np.ones(shape), np.ones(shape),
        np.full(shape, 2.0), np.full(shape, 4.0),
    )
    assert aggregate_resistance(inp) == 3.0


def test_resistance_single_cell_symmetry():
    x = 0.73
    inp = make_inputs([[1.0]], [[1.0]], [[1.0]], [[x]], [[x]])
    assert aggregate_resistance(inp) == pytest.approx(x, rel=1e-15)
