import json
import math

import numpy as np
import pytest

from qitp import hamiltonian as ham
from qitp import propagator as prop
from qitp import sweep
from qitp.errors import ConfigError, EmptyResult, InfeasibleParams
from qitp.plotting import plot_sweep, plot_uncertainty


class TestBetas:
    @pytest.mark.parametrize(
        "spec, expect",
        [
            ("0,0.5,1", [0.0, 0.5, 1.0]),
            ("0:1:3", [0.0, 0.5, 1.0]),
            ([1, 0], [0.0, 1.0]),
            (2, [2.0]),
        ],
    )
    def test_parse(self, spec, expect):
        assert sweep.parse_betas(spec) == expect

    @pytest.mark.parametrize("spec", ["", "-1", "0:1", "0:1:0", "nan", "inf", None])
    def test_reject(self, spec):
        with pytest.raises(ConfigError):
            sweep.parse_betas(spec)


class TestConfig:
    def test_round_trip(self):
        cfg = sweep.SweepConfig("builtin:spin2", "0:1:3", observable="sz0", e_trial=-3, p=0.8, shots=50, seed=4)
        d = json.loads(json.dumps(cfg.to_dict()))
        cfg2 = sweep.SweepConfig.from_dict(d)
        assert cfg2 == cfg and cfg2.to_dict() == d

    @pytest.mark.parametrize(
        "kwargs",
        [dict(shots=0), dict(reps=0), dict(p=1.5), dict(p=0), dict(trotter_steps=0), dict(e_trial="low")],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            sweep.SweepConfig("builtin:spin2", [0.0], **kwargs)

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            sweep.SweepConfig.from_dict({"hamiltonian": "builtin:spin2", "betas": [0], "bogus": 1})

    def test_auto_ground(self):
        h = ham.builtin_model("spin2")
        assert sweep.resolve_e_trial("auto-ground", h) == h.ground_energy
        assert sweep.resolve_e_trial(None, h) == h.ground_energy
        assert sweep.resolve_e_trial("-2.5", h) == -2.5

    def test_load_model(self, tmp_path):
        p = tmp_path / "h.json"
        p.write_text(json.dumps(ham.hamiltonian_to_document(ham.builtin_model("spin3"))))
        assert sweep.load_model(str(p)).n_sys == 3
        with pytest.raises(ConfigError):
            sweep.load_model(str(tmp_path / "missing.json"))
        (tmp_path / "bad.json").write_text("{")
        with pytest.raises(ConfigError):
            sweep.load_model(str(tmp_path / "bad.json"))


class TestRunSweep:
    def test_beta_zero_partition(self):
        cfg = sweep.SweepConfig("builtin:spin2", [0.0], shots=10**5, seed=1)
        (row,) = sweep.run_sweep(cfg).rows
        assert row.z_exact == 4.0
        assert abs(row.z_est - 4.0) <= 3 * row.z_sigma

    def test_beta_zero_observable(self):
        cfg = sweep.SweepConfig("builtin:spin3", [0.0], observable="sz0", shots=2000, seed=2)
        (row,) = sweep.run_sweep(cfg).rows
        assert row.obs_exact == pytest.approx(0.0, abs=1e-12)
        assert row.n_qubits == 8

    def test_rows_sorted_and_counts(self):
        cfg = sweep.SweepConfig("builtin:spin2", "1,0,0.5", observable="sz1", p=0.8, shots=500, seed=3)
        res = sweep.run_sweep(cfg)
        assert [r.beta for r in res.rows] == [0.0, 0.5, 1.0]
        assert all(r.n_qubits == 6 for r in res.rows)
        assert math.isfinite(res.chi2_z) and math.isfinite(res.chi2_obs)

    def test_exact_columns_from_oracles(self):
        h = ham.builtin_model("spin2")
        cfg = sweep.SweepConfig("builtin:spin2", [0.7], observable="sz0", p=0.8, shots=100, seed=0)
        (row,) = sweep.run_sweep(cfg).rows
        rho, z = prop.gibbs_oracle(h, 0.7, h.ground_energy)
        assert row.z_exact == z
        assert row.obs_exact == pytest.approx(np.trace(rho @ ham.sigma_z(0, 2).dense).real / z, abs=1e-14)
        assert row.success_prob_exact == pytest.approx(0.8 * z / 4, abs=1e-14)

    def test_estimates_traceable_from_records(self):
        cfg = sweep.SweepConfig("builtin:spin2", [0.4], observable="sz0", p=0.8, shots=300, seed=5, verbose_shots=True)
        res = sweep.run_sweep(cfg)
        rec = res.shot_records[0.4]
        succ = sum(v for k, v in rec["counts"].items() if k[0] == "0")
        assert res.rows[0].z_est == pytest.approx(4 * succ / 300 / 0.8)

    def test_trotter_rows(self):
        cfg = sweep.SweepConfig("builtin:spin3", [0.0, 0.5], observable="sz0", trotter_steps=2, shots=20000, seed=6)
        res = sweep.run_sweep(cfg)
        r = res.rows[1]
        assert r.n_qubits == 13
        assert r.z_reference == r.z_trotter_exact
        assert abs(r.z_est - r.z_trotter_exact) < 4 * r.z_sigma
        assert res.rows[0].z_est == pytest.approx(8.0, rel=0.05)

    def test_infeasible_names_beta(self):
        h = ham.builtin_model("spin2")
        cfg = sweep.SweepConfig("builtin:spin2", [0.0, 1.0], e_trial=h.ground_energy + 1.0, shots=10)
        with pytest.raises(InfeasibleParams, match="beta=1.0"):
            sweep.run_sweep(cfg)

    def test_workers_do_not_change_results(self):
        base = dict(hamiltonian="builtin:spin2", betas="0:2:5", observable="sz0", p=0.8, shots=400, seed=9, reps=3)
        a = sweep.run_sweep(sweep.SweepConfig(**base))
        b = sweep.run_sweep(sweep.SweepConfig(**base, workers=4))
        # compare rendered text: NaN cells defeat list equality
        csv_a = sweep.table_csv(sweep.ROW_FIELDS, sweep.sweep_rows(a))
        assert csv_a == sweep.table_csv(sweep.ROW_FIELDS, sweep.sweep_rows(b))


class TestExact:
    def test_beta_zero(self):
        rows = sweep.run_exact(ham.builtin_model("spin3"), [0.0], ham.builtin_model("spin3").ground_energy)
        assert rows[0]["z"] == 8.0 and rows[0]["success_prob"] == 1.0

    def test_large_beta_energy(self):
        h = ham.builtin_model("spin2")
        gap = np.diff(h.eig.eigenvalues)[0]
        rows = sweep.run_exact(h, [50 / gap], h.ground_energy, ham.Observable.from_hamiltonian(h))
        assert abs(rows[0]["obs"] - h.ground_energy) < 1e-6
        assert rows[-1]["beta"] == math.inf and rows[-1]["obs"] == pytest.approx(h.ground_energy)

    def test_trotter_columns_converge(self):
        h = ham.builtin_model("spin3")
        e0 = h.ground_energy
        z = sweep.run_exact(h, [1.0], e0)[0]["z"]
        z1 = sweep.run_exact(h, [1.0], e0, trotter_steps=1)[0]["z_trotter"]
        z4 = sweep.run_exact(h, [1.0], e0, trotter_steps=4)[0]["z_trotter"]
        assert abs(z4 - z) < abs(z1 - z)


class TestCompile:
    @pytest.mark.parametrize("steps, qubits", [(1, 10), (2, 13), (3, 16), (4, 19)])
    def test_trotter_qubit_totals(self, tmp_path, steps, qubits):
        h = ham.builtin_model("spin3")
        params = prop.QitpParams(0.005 * steps, h.ground_energy, 1.0, steps)
        rep = sweep.compile_dump(h, params, ham.sigma_z(0, 3), tmp_path / "c.json")
        assert rep["n_qubits"] == qubits
        assert rep["roles"]["qitp_ancilla"] == 3 * steps
        doc = json.loads((tmp_path / "c.json").read_text())
        assert doc["report"] == json.loads(json.dumps(rep))
        assert len(doc["circuit"]["roles"]) == qubits

    def test_five_qubits(self, tmp_path):
        h = ham.builtin_model("spin2")
        rep = sweep.compile_dump(h, prop.QitpParams(0.3, h.ground_energy), None, tmp_path / "c.json")
        assert rep["n_qubits"] == 5


class TestOutput:
    def test_csv_round_trip(self, tmp_path):
        sweep.write_table(tmp_path / "t.csv", ("a", "b", "c"), [[0.1, True, float("nan")]], {"x": float("inf")})
        assert (tmp_path / "t.csv").read_text() == "a,b,c\n0.1,true,nan\n"
        assert json.loads((tmp_path / "t.summary.json").read_text()) == {"x": "inf"}

    def test_json(self, tmp_path):
        sweep.write_table(tmp_path / "t.json", ("a",), [[float("nan")]])
        assert json.loads((tmp_path / "t.json").read_text())["rows"] == [{"a": None}]

    def test_format(self):
        out = sweep.format_table(("beta", "z"), [[0.0, 4.0], [1.0, float("nan")]])
        assert out.splitlines()[-1].split() == ["1", "-"]


class TestPlots:
    def _result(self, betas, obs="sz0"):
        cfg = sweep.SweepConfig("builtin:spin2", betas, observable=obs, p=0.8, shots=200, seed=1)
        return sweep.run_sweep(cfg)

    def test_single_row(self, tmp_path):
        out = plot_sweep(self._result([0.5], obs=None), tmp_path / "a.svg")
        text = out.read_text()
        assert 'id="axes_1"' in text and 'id="axes_2"' not in text

    def test_two_panels(self, tmp_path):
        text = plot_sweep(self._result("0:1:5"), tmp_path / "a.svg").read_text()
        assert 'id="axes_2"' in text
        # beta glyph in the axis labels
        assert "3b2" in text

    def test_deterministic(self, tmp_path):
        a = plot_sweep(self._result("0:1:5"), tmp_path / "a.svg").read_bytes()
        b = plot_sweep(self._result("0:1:5"), tmp_path / "b.svg").read_bytes()
        assert a == b

    def test_empty(self, tmp_path):
        res = sweep.SweepResult([], "x", None, float("nan"), float("nan"))
        with pytest.raises(EmptyResult):
            plot_sweep(res, tmp_path / "a.svg")
        with pytest.raises(EmptyResult):
            plot_uncertainty([], tmp_path / "a.svg")
        with pytest.raises(EmptyResult):
            sweep.check_nonempty(res)


@pytest.mark.slow
def test_chi2_calibration_many_seeds():
    # the fraction of 10-point sweeps whose reduced chi2 leaves [0.2, 2.5]
    # should match the chi-square(10) tail mass
    stats = pytest.importorskip("scipy.stats")
    tail = 1 - (stats.chi2.cdf(25, 10) - stats.chi2.cdf(2, 10))
    n = 1000
    vals = np.array([
        sweep.run_sweep(sweep.SweepConfig("builtin:spin2", "0:2:10", p=0.8, shots=10**4, seed=10_000 + r)).chi2_z
        for r in range(n)
    ])
    outside = np.mean((vals < 0.2) | (vals > 2.5))
    assert abs(outside - tail) < 3 * np.sqrt(tail * (1 - tail) / n)
    assert abs(vals.mean() - 1) < 3 * np.sqrt(0.2 / n)
