"""Acceptance suite: one test per release criterion, at pinned tolerances.

Run with `pytest tests/test_acceptance.py -s` to see one [PASS]/[FAIL]
line per criterion.
"""

import contextlib
import json
import math
import threading
import time
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np
import pytest

from moneytensor.api_server import make_server
from moneytensor.cli import run_command
from moneytensor.io_formats import format_real, frame_to_json_dict, write_indicator_csv
from moneytensor.ledger import Taxonomy, Transaction, build_tensor, parse_transactions_csv
from moneytensor.momentum import (
    AmplifierParams,
    MomentumInputs,
    gdp_amplifier,
    momentum_slice,
)
from moneytensor.policy import (
    FeedbackPlan,
    RegulatoryPlan,
    StimulusPlan,
    adjust_resistance,
    apply_feedback,
    apply_stimulus,
)
from moneytensor.scenarios import load_scenario, load_scenario_bytes
from moneytensor.sim import Shock, init_state, run, step
from moneytensor.tensor_core import (
    AlsConfig,
    FactorTriple,
    Tensor3,
    frobenius_norm,
    rank1_approx,
    reconstruct,
)

from oracles import (
    balanced_closed_form,
    feedback_entries,
    gdp_formula,
    grid_search_rank1_residual,
    momentum_entries,
    resistance_entries,
    stimulus_entries,
)

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "crisis_demo_golden.csv"


@contextlib.contextmanager
def criterion(name):
    started = time.time()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name} ({time.time() - started:.2f}s)")


# --- 1. rank-1 recovery ------------------------------------------------------------

def test_rank1_recovery_100_random_tensors():
    with criterion(
        "rank-1 recovery: 100 seeded tensors up to 6x5x4, residual <= 1e-8*norm, "
        "factors to 1e-6, < 5 s"
    ):
        started = time.time()
        rng = np.random.default_rng(20240601)
        for case in range(100):
            dims = (
                int(rng.integers(1, 7)),
                int(rng.integers(1, 6)),
                int(rng.integers(1, 5)),
            )
            x = rng.normal(size=dims[0])
            y = rng.normal(size=dims[1])
            z = rng.normal(size=dims[2])
            x /= np.linalg.norm(x)
            y /= np.linalg.norm(y)
            z /= np.linalg.norm(z)
            weight = float(rng.uniform(0.1, 10.0))
            generator = FactorTriple(weight, x, y, z).canonicalized()
            t = reconstruct(generator)
            got, residual = rank1_approx(t, AlsConfig(max_iters=50))
            norm = frobenius_norm(t)
            assert residual <= 1e-8 * norm, f"case {case}: residual {residual}"
            assert np.allclose(got.x, generator.x, atol=1e-6), f"case {case} x"
            assert np.allclose(got.y, generator.y, atol=1e-6), f"case {case} y"
            assert np.allclose(got.z, generator.z, atol=1e-6), f"case {case} z"
            assert got.weight == pytest.approx(generator.weight, rel=1e-6)
        assert time.time() - started < 5.0


# --- 2. ALS vs grid-search oracle ---------------------------------------------------

def test_als_matches_grid_oracle_20_tensors():
    with criterion(
        "ALS oracle equivalence: 20 seeded 2x2x2 tensors vs 0.01-grid search, "
        "|diff| < 1e-3, < 60 s"
    ):
        started = time.time()
        for seed in range(20):
            rng = np.random.default_rng(5000 + seed)
            values = rng.uniform(size=(2, 2, 2)) if seed % 2 else rng.normal(size=(2, 2, 2))
            _, residual = rank1_approx(Tensor3(values))
            oracle = grid_search_rank1_residual(values, resolution=0.01)
            assert abs(residual - oracle) < 1e-3, f"seed {seed}"
        assert time.time() - started < 60.0


# --- 3. conservation ----------------------------------------------------------------

def test_conservation_up_to_1e4_transactions():
    with criterion(
        "conservation: sum of cells == sum of amounts to 1e-9 relative, "
        "permutation invariance exact, up to 10^4 txns"
    ):
        tax = Taxonomy(
            sectors=("healthcare", "manufacturing", "services", "finance"),
            agents=("household", "business", "government"),
            periods=tuple(f"2021Q{q}" for q in range(1, 5)),
        )
        rng = np.random.default_rng(314)
        for count in (10, 1000, 10000):
            txns = [
                Transaction(
                    float(rng.uniform(0.01, 10000.0)),
                    tax.sectors[rng.integers(4)],
                    tax.agents[rng.integers(3)],
                    tax.periods[rng.integers(4)],
                )
                for _ in range(count)
            ]
            t = build_tensor(txns, tax)
            expected = math.fsum(txn.amount for txn in txns)
            assert abs(t.total() - expected) <= 1e-9 * expected
            shuffled = list(txns)
            rng.shuffle(shuffled)
            assert np.array_equal(build_tensor(shuffled, tax).values, t.values)


# --- 4. equation checks -------------------------------------------------------------

def test_equation_hand_oracles():
    with criterion(
        "equation checks: five operators vs hand oracles on >= 25 inputs at "
        "1e-12 relative; homogeneity/additivity"
    ):
        rng = np.random.default_rng(777)

        # worked examples first
        assert gdp_amplifier(
            AmplifierParams(beta=2.0, p1=10.0, p2=3.0, p3=1.0, r_in=2.0, r_out=4.0)
        ) == 8.0
        ones = np.ones((2, 2))
        assert np.all(momentum_slice(MomentumInputs(ones, ones, ones, ones, ones, 1.0)).g == -1.0)
        assert np.array_equal(
            apply_stimulus(np.array([[1.0, 2.0], [3.0, 4.0]]),
                           StimulusPlan(0.5, np.full((2, 2), 2.0))),
            np.array([[2.0, 3.0], [4.0, 5.0]]),
        )
        assert np.array_equal(
            adjust_resistance(np.array([[2.0, 3.0]]), RegulatoryPlan(0.5, np.full((1, 2), 2.0))),
            np.array([[1.0, 2.0]]),
        )
        assert adjust_resistance(np.array([[1.0]]), RegulatoryPlan(2.0, np.array([[1.0]])))[0, 0] == 1e-6
        from moneytensor.momentum import MomentumMatrix
        assert np.all(
            apply_feedback(MomentumMatrix(np.ones((2, 2))), FeedbackPlan(-1.0, np.ones((2, 2)))).g == 0.0
        )

        for _ in range(25):
            beta = float(rng.uniform(0.1, 4.0))
            p1, p2, p3 = (float(v) for v in rng.uniform(0.0, 10.0, 3))
            r_in, r_out = (float(v) for v in rng.uniform(0.1, 5.0, 2))
            got = gdp_amplifier(AmplifierParams(beta=beta, p1=p1, p2=p2, p3=p3, r_in=r_in, r_out=r_out))
            want = gdp_formula(beta, p1, p2, p3, r_in, r_out)
            assert got == pytest.approx(want, rel=1e-12)

            shape = (int(rng.integers(1, 4)), int(rng.integers(1, 4)))
            m1, m2, m3 = (rng.uniform(0, 10, shape) for _ in range(3))
            r1, r2 = (rng.uniform(0.1, 4, shape) for _ in range(2))
            inp = MomentumInputs(m1, m2, m3, r1, r2, beta)
            want_slice = momentum_entries(m1.tolist(), m2.tolist(), m3.tolist(),
                                          r1.tolist(), r2.tolist(), beta)
            assert np.allclose(momentum_slice(inp).g, want_slice, rtol=1e-12, atol=0.0)

            lam = float(rng.uniform(0, 2))
            s = rng.uniform(0, 5, shape)
            assert np.allclose(
                apply_stimulus(m1, StimulusPlan(lam, s)),
                stimulus_entries(m1.tolist(), lam, s.tolist()),
                rtol=1e-12, atol=0.0,
            )

            mu = float(rng.uniform(0, 2))
            theta = rng.uniform(0, 3, shape)
            assert np.allclose(
                adjust_resistance(r1, RegulatoryPlan(mu, theta)),
                resistance_entries(r1.tolist(), mu, theta.tolist()),
                rtol=1e-12, atol=0.0,
            )

            gamma = float(rng.normal())
            g = rng.normal(size=shape)
            f = rng.normal(size=shape)
            got_fb = apply_feedback(MomentumMatrix(g), FeedbackPlan(gamma, f)).g
            assert np.allclose(
                got_fb, feedback_entries(g.tolist(), gamma, f.tolist()),
                rtol=1e-12, atol=1e-13,
            )

            # beta homogeneity at 1e-12 relative
            c = float(rng.uniform(0.5, 3.0))
            assert np.allclose(
                momentum_slice(inp.replace(beta=c * beta)).g,
                c * momentum_slice(inp).g,
                rtol=1e-12, atol=1e-15,
            )

        # lambda additivity, exact on exactly-representable data
        m_int = np.array([[1.0, 7.0], [3.0, 2.0]])
        s_int = np.array([[2.0, 4.0], [8.0, 1.0]])
        chained = apply_stimulus(apply_stimulus(m_int, StimulusPlan(1.0, s_int)),
                                 StimulusPlan(2.0, s_int))
        direct = apply_stimulus(m_int, StimulusPlan(3.0, s_int))
        assert np.array_equal(chained, direct)
        # gamma = 0 feedback identity, bit-exact
        g = rng.normal(size=(3, 2))
        assert np.array_equal(
            apply_feedback(MomentumMatrix(g), FeedbackPlan(0.0, rng.normal(size=(3, 2)))).g, g
        )


# --- 5. the worked $100 transaction -------------------------------------------------

def test_worked_transaction_decomposes_to_weight_100():
    with criterion(
        "worked transaction: $100 healthcare/household/2021Q1 ingests to a tensor "
        "whose decomposition is weight 100, residual 0, basis factors"
    ):
        tax = Taxonomy(
            sectors=("healthcare", "manufacturing"),
            agents=("household", "business"),
            periods=("2021Q1", "2021Q2"),
        )
        txns = parse_transactions_csv(
            b"amount,sector,agent,period\n100,healthcare,household,2021Q1\n"
        )
        tensor = build_tensor(txns, tax)
        factors, residual = rank1_approx(tensor)
        assert factors.weight == 100.0
        assert residual == 0.0
        assert np.array_equal(factors.x, np.array([1.0, 0.0]))
        assert np.array_equal(factors.y, np.array([1.0, 0.0]))
        assert np.array_equal(factors.z, np.array([1.0, 0.0]))


# --- 6. simulation determinism and oracle -------------------------------------------

def test_simulation_determinism_and_closed_form_oracle(tmp_path):
    with criterion(
        "simulation: crisis_demo bytes identical across 3 CLI runs and the API "
        "path; balanced scenario matches closed-form oracle to 1e-9 x 40 steps, < 10 s"
    ):
        started = time.time()
        scenario_path = tmp_path / "crisis_demo.json"
        scenario_path.write_bytes(load_scenario_bytes("crisis_demo"))
        outputs = []
        for n in range(3):
            out = tmp_path / f"run{n}.csv"
            assert run_command(
                ["simulate", "--scenario", str(scenario_path), "--out", str(out)]
            ) == 0
            outputs.append(out.read_bytes())
        golden = GOLDEN.read_bytes()
        assert outputs[0] == outputs[1] == outputs[2] == golden

        # API path, stepwise
        cfg, shocks, schedule = load_scenario("crisis_demo")
        batch = run(cfg, shocks, schedule)
        assert write_indicator_csv(batch) == golden
        server = make_server(port=0)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            base = f"http://127.0.0.1:{server.server_port}"
            status, doc = _call(base, "POST", "/sessions", {"scenario": "crisis_demo"})
            assert status == 201
            sid = doc["session"]["id"]
            api_frames = []
            for _ in range(cfg.steps):
                status, doc = _call(base, "POST", f"/sessions/{sid}/step", {})
                assert status == 200
                api_frames.append(doc["frame"])
            assert api_frames == [frame_to_json_dict(f) for f in batch]
        finally:
            server.shutdown()
            server.server_close()

        # balanced scenario vs the independent closed-form oracle
        bal_cfg, bal_shocks, bal_schedule = load_scenario("balanced_demo")
        assert bal_shocks == () and bal_schedule == {}
        frames = run(bal_cfg)
        oracle = balanced_closed_form(bal_cfg.steps)
        for frame, (k, growth, inflation, u, trade, resistance) in zip(frames, oracle):
            assert frame.step == k
            assert abs(frame.gdp_growth - growth) <= 1e-9
            assert abs(frame.inflation - inflation) <= 1e-9
            assert abs(frame.unemployment - u) <= 1e-9
            assert abs(frame.trade_balance - trade) <= 1e-9
            assert abs(frame.economic_resistance - resistance) <= 1e-9
        assert time.time() - started < 10.0


# --- 7. shock semantics --------------------------------------------------------------

def test_shock_semantics():
    with criterion(
        "shock semantics: crisis resistance strictly above baseline in window, "
        "pre-shock frames bit-identical, green transition conserves m1 to 1e-9"
    ):
        cfg, _, _ = load_scenario("crisis_demo")
        shock = Shock("financial_crisis", 10, 8, 0.15)
        base = run(cfg)
        shocked = run(cfg, [shock])
        for k in range(10):
            assert shocked[k] == base[k]
        for k in range(10, 18):
            assert shocked[k].economic_resistance > base[k].economic_resistance

        green_cfg, green_shocks, green_schedule = load_scenario("green_transition_demo")
        state = init_state(green_cfg)
        drift = 1.0 + green_cfg.indicators.g_star
        expected = float(state.inputs.m1.sum())
        for k in range(green_cfg.steps):
            active = [s for s in green_shocks if s.active_at(k)]
            state, _ = step(green_cfg, state, green_schedule.get(k, ()), None, active)
            expected *= drift
            got = float(state.inputs.m1.sum())
            assert abs(got - expected) <= 1e-9 * expected


# --- 8. API contract -----------------------------------------------------------------

def _call(base, method, path, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(
        base + path, data=data, method=method,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read().decode())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read().decode())


def test_api_contract_and_fork_replay():
    with criterion(
        "API contract: endpoint examples live; fork replay bit-exact at 5 random points"
    ):
        server = make_server(port=0)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            base = f"http://127.0.0.1:{server.server_port}"

            status, doc = _call(base, "GET", "/healthz")
            assert status == 200 and doc["status"] == "ok"
            status, doc = _call(base, "GET", "/scenarios")
            assert status == 200
            assert any(s["name"] == "crisis_demo" for s in doc["scenarios"])

            status, doc = _call(base, "POST", "/sessions", {"scenario": "crisis_demo"})
            assert status == 201 and doc["session"]["step"] == 0
            sid_a = doc["session"]["id"]
            status, doc = _call(base, "POST", "/sessions", {"scenario": "crisis_demo"})
            assert status == 201 and doc["session"]["id"] != sid_a

            bad_inline = {
                "taxonomy": {"sectors": ["a"], "agents": ["x"]},
                "indicators": {"u0": 0.5, "u_max": 0.3},
            }
            status, doc = _call(base, "POST", "/sessions", {"scenario": bad_inline})
            assert status == 400 and doc["error"]["code"] == "invalid_scenario"

            status, doc = _call(base, "POST", "/sessions", {"scenario": "missing"})
            assert status == 404

            status, doc = _call(
                base, "POST", f"/sessions/{sid_a}/step",
                {"interventions": [{"kind": "bailout", "magnitude": 1.0,
                                    "sectors": ["finance"], "agents": ["household"]}]},
            )
            assert status == 400

            status, doc = _call(base, "GET", f"/sessions/{sid_a}/series")
            assert status == 200 and doc["frames"] == []

            # drive a parent with varied interventions, then fork at 5 points
            rng = np.random.default_rng(99)
            cfg, _, _ = load_scenario("crisis_demo")
            kinds = ("spending", "tax_cut", "subsidy")
            parent_frames = []
            for k in range(cfg.steps):
                body = {}
                if k % 5 == 2:
                    body["interventions"] = [{
                        "kind": kinds[int(rng.integers(3))],
                        "magnitude": float(rng.uniform(10, 200)),
                        "sectors": ["services"],
                        "agents": ["household", "business"],
                    }]
                if k % 7 == 3:
                    body["feedback_gamma"] = float(rng.uniform(-0.5, 0.5))
                status, doc = _call(base, "POST", f"/sessions/{sid_a}/step", body)
                assert status == 200
                parent_frames.append(doc["frame"])

            status, doc = _call(base, "GET", f"/sessions/{sid_a}/series")
            assert doc["frames"] == parent_frames

            # CSV field-for-field equivalence of the series payload
            csv_lines = write_indicator_csv(
                run(cfg, *load_scenario("crisis_demo")[1:])
            )
            for fork_point in sorted(int(v) for v in rng.choice(40, 5, replace=False)):
                status, doc = _call(
                    base, "POST", f"/sessions/{sid_a}/fork", {"at_step": fork_point}
                )
                assert status == 201
                child = doc["session"]["id"]
                status, doc = _call(base, "GET", f"/sessions/{child}/series")
                assert status == 200
                assert doc["frames"] == parent_frames[:fork_point]

            status, doc = _call(base, "POST", f"/sessions/{sid_a}/fork", {"at_step": 41})
            assert status == 400

            # step at configured max -> 409
            status, doc = _call(base, "POST", f"/sessions/{sid_a}/step", {})
            assert status == 409 and doc["error"]["code"] == "max_steps"
        finally:
            server.shutdown()
            server.server_close()


def test_series_fields_match_csv_formatting():
    with criterion(
        "series payload values format to the exact indicator CSV fields"
    ):
        cfg, shocks, schedule = load_scenario("crisis_demo")
        frames = run(cfg, shocks, schedule)
        csv_rows = GOLDEN.read_bytes().decode().splitlines()[1:]
        for frame, row in zip(frames, csv_rows):
            doc = frame_to_json_dict(frame)
            fields = row.split(",")
            assert str(doc["step"]) == fields[0]
            assert format_real(doc["gdp_growth"]) == fields[1]
            assert format_real(doc["inflation"]) == fields[2]
            assert format_real(doc["unemployment"]) == fields[3]
            assert format_real(doc["trade_balance"]) == fields[4]
            assert format_real(doc["economic_resistance"]) == fields[5]
            expected_actions = ";".join(
                f"{a['kind']}:{format_real(a['magnitude'])}" for a in doc["actions"]
            )
            assert expected_actions == fields[6]
