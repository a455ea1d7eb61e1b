"""Config parsing, report-bundle runs, schemas, determinism, exit codes."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from fermidpp import cli
from fermidpp.errors import ConfigurationError
from fermidpp.kernels import fermi_kernel
from fermidpp.linalg import SymmetricOperator
from fermidpp.orthopoly import Charlier, difference_operator, site_window


def write_config(tmp_path: Path, name: str, **fields) -> Path:
    out = tmp_path / name
    fields.setdefault("out_dir", str(tmp_path / f"{name}.out"))
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(fields))
    return path


def read_csv(path: Path):
    lines = path.read_text().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


def kernel_config(**extra):
    cfg = {
        "experiment": "kernel",
        "family": {"name": "charlier", "mu": 2.0},
        "window": [0, 7],
        "beta": 2.0,
    }
    cfg.update(extra)
    return cfg


class TestParseConfig:
    def test_unknown_key_is_named(self, tmp_path):
        path = write_config(tmp_path, "bad", **kernel_config(bogus=1))
        with pytest.raises(ConfigurationError, match="bogus"):
            cli.parse_config(path)

    def test_bad_beta_message(self, tmp_path):
        for beta in (-1, 0, "infinity", True):
            path = write_config(tmp_path, "badbeta", **kernel_config(beta=beta))
            with pytest.raises(ConfigurationError, match='beta must be positive or "inf"'):
                cli.parse_config(path)

    def test_beta_inf_string(self, tmp_path):
        path = write_config(tmp_path, "inf", **kernel_config(beta="inf"))
        assert math.isinf(cli.parse_config(path).beta)

    def test_unknown_experiment_lists_valid(self, tmp_path):
        path = write_config(tmp_path, "bade", experiment="teleport")
        with pytest.raises(ConfigurationError) as err:
            cli.parse_config(path)
        for name in cli.EXPERIMENTS:
            assert name in str(err.value)

    def test_unknown_family_lists_known(self, tmp_path):
        path = write_config(
            tmp_path, "badf", **kernel_config(family={"name": "legendre"})
        )
        with pytest.raises(ConfigurationError, match="charlier"):
            cli.parse_config(path)

    def test_family_missing_parameter(self, tmp_path):
        path = write_config(tmp_path, "missp", **kernel_config(family={"name": "charlier"}))
        with pytest.raises(ConfigurationError, match="family.mu"):
            cli.parse_config(path)

    def test_family_extra_parameter(self, tmp_path):
        path = write_config(
            tmp_path,
            "extrap",
            **kernel_config(family={"name": "charlier", "mu": 2.0, "p": 0.4}),
        )
        with pytest.raises(ConfigurationError, match="'p'"):
            cli.parse_config(path)

    def test_missing_out_dir(self, tmp_path):
        cfg = kernel_config()
        path = tmp_path / "noout.json"
        path.write_text(json.dumps(cfg))
        with pytest.raises(ConfigurationError, match="out_dir"):
            cli.parse_config(path)

    def test_missing_file_and_bad_json(self, tmp_path):
        with pytest.raises(ConfigurationError, match="exist"):
            cli.parse_config(tmp_path / "nope.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigurationError, match="JSON"):
            cli.parse_config(bad)

    def test_window_shape(self, tmp_path):
        path = write_config(tmp_path, "badw", **kernel_config(window=[0, 1, 2]))
        with pytest.raises(ConfigurationError, match="window"):
            cli.parse_config(path)

    def test_threads_accepted(self, tmp_path):
        path = write_config(tmp_path, "thr", **kernel_config(threads=4))
        assert cli.parse_config(path).threads == 4


class Test30ManifestAndDeterminism:
    def run_main(self, tmp_path, name, cfg, extra_args=()):
        path = write_config(tmp_path, name, **cfg)
        code = cli.main([str(path), *extra_args])
        out = Path(json.loads(path.read_text())["out_dir"])
        return code, out

    def test_manifest_keys_exact(self, tmp_path):
        code, out = self.run_main(tmp_path, "mk", kernel_config())
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert set(manifest) == {
            "config",
            "version",
            "started",
            "elapsed_s",
            "status",
            "failures",
        }
        assert manifest["status"] == "success"
        assert manifest["failures"] == []
        assert manifest["config"]["experiment"] == "kernel"

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = {
            "experiment": "sample",
            "family": {"name": "krawtchouk", "M": 5, "p": 0.4},
            "window": [0, 5],
            "N": 3,
            "samples": 20,
            "seed": 9,
        }
        _, out_a = self.run_main(tmp_path, "runa", dict(cfg))
        _, out_b = self.run_main(tmp_path, "runb", dict(cfg))
        assert (out_a / "samples.csv").read_bytes() == (out_b / "samples.csv").read_bytes()
        ma = json.loads((out_a / "manifest.json").read_text())
        mb = json.loads((out_b / "manifest.json").read_text())
        for m in (ma, mb):
            m.pop("started")
            m.pop("elapsed_s")
            m["config"].pop("out_dir")
        assert ma == mb

    def test_out_and_seed_overrides(self, tmp_path):
        cfg = {
            "experiment": "sample",
            "family": {"name": "krawtchouk", "M": 5, "p": 0.4},
            "window": [0, 5],
            "N": 3,
            "samples": 20,
            "seed": 9,
        }
        other = tmp_path / "elsewhere"
        code, _ = self.run_main(
            tmp_path, "ov", cfg, ("--out", str(other), "--seed", "10")
        )
        assert code == 0
        manifest = json.loads((other / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 10
        _, base = self.run_main(tmp_path, "ovbase", dict(cfg))
        assert (other / "samples.csv").read_bytes() != (base / "samples.csv").read_bytes()

    def test_failure_manifest_on_unknown_key(self, tmp_path):
        path = write_config(tmp_path, "fm", **kernel_config(bogus=3))
        code = cli.main([str(path)])
        assert code == 2
        out = Path(json.loads(path.read_text())["out_dir"])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["status"] == "config_error"
        assert "bogus" in manifest["failures"][0]["message"]


class TestKernelExperiment:
    def test_kernel_csv_matches_library(self, tmp_path):
        path = write_config(tmp_path, "k", **kernel_config(mu=0.3))
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        header, rows = read_csv(out / "kernel.csv")
        assert header == "x,y,value"
        family = Charlier(mu=2.0)
        D = difference_operator(family, site_window(family, 0, 7))
        shift = 0.3 * np.eye(D.dim)
        H = SymmetricOperator(-(D.entries + shift), site_labels=D.site_labels)
        K = fermi_kernel(H, 2.0)
        assert len(rows) == K.dim**2
        for x, y, value in rows:
            i, j = K.index_of(float(x)), K.index_of(float(y))
            assert abs(float(value) - K.entries[i, j]) < 1e-15

    def test_spacetime_grid(self, tmp_path):
        path = write_config(
            tmp_path, "st", **kernel_config(times=[-0.5, 0.0, 0.7], sites=[0, 1, 2])
        )
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        header, rows = read_csv(out / "spacetime.csv")
        assert header == "x,t,y,s,value"
        assert len(rows) == (3 * 3) ** 2

    def test_continuous_family_rejected(self, tmp_path):
        path = write_config(
            tmp_path, "cont", **kernel_config(family={"name": "hermite"})
        )
        assert cli.main([str(path)]) == 2


class TestEnsembleExperiment:
    def test_correspondence_table(self, tmp_path):
        path = write_config(
            tmp_path,
            "ens",
            experiment="ensemble",
            family={"name": "krawtchouk", "M": 6, "p": 0.4},
            window=[0, 6],
            N=3,
        )
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        header, rows = read_csv(out / "verify.csv")
        assert header == "case_id,n,sites,times,det_value,trace_value,abs_err"
        assert len(rows) == 7 + 7 * 6 // 2
        assert max(float(r[-1]) for r in rows) < 1e-10
        header, rows = read_csv(out / "kernel.csv")
        assert header == "x,y,value"
        assert len(rows) == 49

    def test_truncated_mass_failure_exits_3(self, tmp_path):
        path = write_config(
            tmp_path,
            "shortw",
            experiment="ensemble",
            family={"name": "charlier", "mu": 1.0},
            window=[0, 2],
            N=2,
        )
        assert cli.main([str(path)]) == 3
        out = Path(json.loads(path.read_text())["out_dir"])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["status"] == "validity_error"
        assert manifest["failures"]


class TestSampleExperiment:
    def test_projection_draws_fixed_count(self, tmp_path):
        path = write_config(
            tmp_path,
            "smp",
            experiment="sample",
            family={"name": "krawtchouk", "M": 5, "p": 0.4},
            window=[0, 5],
            N=3,
            samples=25,
            seed=4,
        )
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        header, rows = read_csv(out / "samples.csv")
        assert header == "sample_id,bitstring"
        assert len(rows) == 25
        for sample_id, bits in rows:
            assert len(bits) == 6
            assert bits.count("1") == 3
        assert [r[0] for r in rows] == [str(i) for i in range(25)]

    def test_finite_beta_draws(self, tmp_path):
        path = write_config(
            tmp_path,
            "smpb",
            experiment="sample",
            family={"name": "charlier", "mu": 2.0},
            window=[0, 7],
            beta=2.0,
            samples=10,
            seed=4,
        )
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        _, rows = read_csv(out / "samples.csv")
        assert all(len(bits) == 8 and set(bits) <= {"0", "1"} for _, bits in rows)


class TestDynamicsExperiment:
    def test_trace_equals_determinant_bundle(self, tmp_path):
        path = write_config(
            tmp_path,
            "dyn",
            experiment="dynamics",
            family={"name": "charlier", "mu": 2.0},
            window=[0, 9],
            beta=2.0,
            times=[-0.5, 0.0, 0.7],
            samples=12,
            seed=6,
        )
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        header, rows = read_csv(out / "verify.csv")
        assert header == "case_id,n,sites,times,det_value,trace_value,abs_err"
        assert rows
        assert max(float(r[-1]) for r in rows) <= 1e-9
        header, rows = read_csv(out / "certificate.csv")
        assert header == "t,min_minor_order,min_minor_value,pass"
        assert all(r[-1] == "1" for r in rows)
        header, rows = read_csv(out / "trajectory.csv")
        assert header == "draw_id,step,time,bitstring"
        assert len(rows) == 12 * 3
        assert all(len(r[-1]) == 10 for r in rows)

    def test_infinite_beta_rejected(self, tmp_path):
        path = write_config(
            tmp_path,
            "dyninf",
            experiment="dynamics",
            family={"name": "charlier", "mu": 2.0},
            window=[0, 5],
            beta="inf",
            times=[0.0],
            samples=1,
            seed=0,
        )
        assert cli.main([str(path)]) == 2

    def test_oversized_window_rejected(self, tmp_path):
        path = write_config(
            tmp_path,
            "dynbig",
            experiment="dynamics",
            family={"name": "charlier", "mu": 2.0},
            window=[0, 15],
            beta=2.0,
            times=[0.0],
            samples=1,
            seed=0,
        )
        assert cli.main([str(path)]) == 2


class TestVerifyExperiment:
    def test_randomized_cases_agree(self, tmp_path):
        path = write_config(
            tmp_path, "ver", experiment="verify", seed=11, samples=8
        )
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        header, rows = read_csv(out / "verify.csv")
        assert header == "case_id,n,sites,times,det_value,trace_value,abs_err"
        assert len(rows) == 8
        assert max(float(r[-1]) for r in rows) <= 1e-9


class TestLimitsExperiment:
    def test_single_regime_ladder(self, tmp_path):
        path = write_config(
            tmp_path,
            "lim",
            experiment="limits",
            family={"name": "charlier_dhermite"},
            N=4,
        )
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        header, rows = read_csv(out / "limits.csv")
        assert header == "regime,ladder_k,scale_param,sup_entry_error"
        assert len(rows) == 4
        errors = [float(r[-1]) for r in rows]
        assert all(a > b for a, b in zip(errors, errors[1:]))

    def test_all_regimes_by_default(self, tmp_path):
        path = write_config(tmp_path, "limall", experiment="limits", N=2)
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        _, rows = read_csv(out / "limits.csv")
        assert len(rows) == 12
        assert len({r[0] for r in rows}) == 6

    def test_non_regime_family_rejected(self, tmp_path):
        path = write_config(
            tmp_path,
            "limbad",
            experiment="limits",
            family={"name": "charlier", "mu": 1.0},
        )
        assert cli.main([str(path)]) == 2


class TestCylindricExperiment:
    def test_bundle_contents(self, tmp_path):
        path = write_config(
            tmp_path,
            "cyl",
            experiment="cylindric",
            n_max=6,
            theta=1.0,
            beta=1.0,
            times=[0.2, 0.6],
            samples=15,
            seed=5,
        )
        assert cli.main([str(path)]) == 0
        out = Path(json.loads(path.read_text())["out_dir"])
        header, rows = read_csv(out / "cylindric.csv")
        assert header == "lambda,mu,t,entry"
        assert min(float(r[-1]) for r in rows) >= 0.0
        labels = {r[0] for r in rows}
        assert "" in labels and "1" in labels and "2+1" in labels
        header, rows = read_csv(out / "limits.csv")
        assert header == "regime,ladder_k,scale_param,sup_entry_error"
        assert all(r[0] == "cylindric_semigroup" for r in rows)
        assert max(float(r[-1]) for r in rows) < 1e-3
        header, rows = read_csv(out / "trajectory.csv")
        assert header == "draw_id,step,time,bitstring"
        assert len(rows) == 15 * 2
        for r in rows:
            assert len(r[-1]) == 14
            assert r[-1].count("1") == 7

    def test_trace_underflow_exits_4(self, tmp_path):
        path = write_config(
            tmp_path,
            "cylu",
            experiment="cylindric",
            n_max=2,
            theta=40.0,
            beta=5.0,
            times=[1.0],
            samples=1,
            seed=0,
        )
        assert cli.main([str(path)]) == 4
        out = Path(json.loads(path.read_text())["out_dir"])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["status"] == "numerical_failure"
        assert manifest["failures"]
