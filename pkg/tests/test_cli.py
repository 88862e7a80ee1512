from __future__ import annotations

import json
import math

import pytest

from mellin_deconv.cli import EXIT_ASSUMPTION, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, build_parser, main

SUBCOMMANDS = ["estimate", "select", "delta", "regime", "simulate", "rates"]


@pytest.fixture
def ones(tmp_path):
    p = tmp_path / "y.txt"
    p.write_text("1\n1\n1\n")
    return p


def _run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def _scenario_file(tmp_path, **kw):
    doc = {"target": "exp", "error": "uniform", "functional": {"kind": "density", "x0": 1.0},
           "c": 1.0, "n": 10, "replications": 1, "seed": 3, "selection": {"mode": "fixed", "k": 2}}
    doc.update(kw)
    p = tmp_path / "scenario.json"
    p.write_text(json.dumps(doc))
    return p


DENSITY = ["--functional", "density", "--x0", "1", "--c", "1", "--error", "beta:1"]


class TestHelp:
    @pytest.mark.parametrize("cmd", SUBCOMMANDS)
    def test_every_flag_documented(self, cmd):
        sub = build_parser()._subparsers._group_actions[0].choices[cmd]
        for action in sub._actions:
            if action.dest != "help":
                assert action.help, f"{cmd} {action.dest}"

    def test_c_help_names_constraints(self, capsys):
        with pytest.raises(SystemExit):
            main(["estimate", "--help"])
        out = capsys.readouterr().out
        assert "c < 1" in out and "c > 1" in out


class TestEstimate:
    def test_three_ones(self, ones, capsys):
        code, out, _ = _run(["estimate", ones, *DENSITY, "--k", "1"], capsys)
        assert code == EXIT_OK
        assert json.loads(out)["theta_hat"] == pytest.approx(1 / math.pi, rel=1e-12)

    def test_k_zero(self, ones, capsys):
        code, _, err = _run(["estimate", ones, *DENSITY, "--k", "0"], capsys)
        assert code == EXIT_INPUT and "--k" in err

    def test_cdf_c2(self, ones, capsys):
        code, _, err = _run(["estimate", ones, "--functional", "cdf", "--x0", "1", "--c", "2",
                             "--error", "beta:1", "--k", "1"], capsys)
        assert code == EXIT_ASSUMPTION and "c < 1" in err

    def test_bad_line(self, tmp_path, capsys):
        p = tmp_path / "y.txt"
        p.write_text("1.0\n\n2.0\nabc\n")
        code, _, err = _run(["estimate", p, *DENSITY, "--k", "1"], capsys)
        assert code == EXIT_INPUT and "line 4" in err

    def test_negative_line(self, tmp_path, capsys):
        p = tmp_path / "y.txt"
        p.write_text("1.0\n-2\n")
        code, _, err = _run(["estimate", p, *DENSITY, "--k", "1"], capsys)
        assert code == EXIT_INPUT and "line 2" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = _run(["estimate", tmp_path / "nope", *DENSITY, "--k", "1"], capsys)
        assert code == EXIT_INPUT

    def test_infinite_sup(self, ones, capsys):
        code, _, _ = _run(["estimate", ones, "--functional", "density", "--x0", "1", "--c", "0.6",
                           "--error", "gamma:0.5", "--adaptive", "--grid", "practical",
                           "--chi", "1"], capsys)
        assert code == EXIT_ASSUMPTION

    def test_small_chi_theoretical(self, ones, capsys):
        code, _, err = _run(["estimate", ones, *DENSITY, "--adaptive", "--chi", "1"], capsys)
        assert code == EXIT_ASSUMPTION and "72" in err

    def test_adaptive_and_output_file(self, ones, tmp_path, capsys):
        out = tmp_path / "r.json"
        code, stdout, _ = _run(["select", ones, *DENSITY, "-o", out], capsys)
        assert code == EXIT_OK and stdout == ""
        report = json.loads(out.read_text())
        assert report["k_hat"] == 1 and report["grid"] == [1] and report["certified"]
        # the temporary file of the atomic write is gone
        assert sorted(p.name for p in tmp_path.iterdir()) == ["r.json", "y.txt"]

    def test_input_untouched(self, ones, capsys):
        before = ones.read_bytes()
        _run(["estimate", ones, *DENSITY, "--k", "1"], capsys)
        assert ones.read_bytes() == before


class TestDiagnostics:
    def test_delta(self, capsys):
        code, out, _ = _run(["delta", *DENSITY, "--k", "1", "5"], capsys)
        assert code == EXIT_OK
        rows = json.loads(out)["delta"]
        assert rows[0]["delta"] == pytest.approx(4 / (3 * math.pi), rel=1e-12)
        assert rows[1]["delta"] == pytest.approx((5 + 125 / 3) / math.pi, rel=1e-12)

    def test_regime(self, capsys):
        code, out, _ = _run(["regime", "--functional", "laplace", "--x0", "1", "--c", "0",
                             "--error", "beta:2"], capsys)
        assert code == EXIT_OK and json.loads(out)["regime"] == "parametric"

    def test_unknown_error(self, capsys):
        code, _, _ = _run(["regime", "--functional", "density", "--x0", "1", "--c", "1",
                           "--error", "cauchy"], capsys)
        assert code == EXIT_INPUT


class TestSimulate:
    def test_smoke_and_determinism(self, tmp_path, capsys):
        sc = _scenario_file(tmp_path)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert _run(["simulate", sc, "-o", a, "--csv", tmp_path / "a.csv"], capsys)[0] == EXIT_OK
        assert _run(["simulate", sc, "-o", b], capsys)[0] == EXIT_OK
        assert a.read_bytes() == b.read_bytes()
        header = (tmp_path / "a.csv").read_text().splitlines()[0]
        assert header == "n,replication,k,theta_hat,theta_true,squared_error"

    def test_schema_error(self, tmp_path, capsys):
        sc = _scenario_file(tmp_path, functional={"kind": "density", "x0": 0})
        code, _, err = _run(["simulate", sc], capsys)
        assert code == EXIT_INPUT and "/functional/x0" in err

    def test_rates(self, tmp_path, capsys):
        doc = {"n_list": [50, 100, 200], "replications": 20}
        sc = _scenario_file(tmp_path, **doc)
        text = json.loads(sc.read_text())
        del text["n"]
        sc.write_text(json.dumps(text))
        csv = tmp_path / "r.csv"
        code, out, _ = _run(["rates", sc, "--csv", csv, "--smoothness", "1.5"], capsys)
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["theory_slope"] is not None and len(report["mse_by_n"]) == 3
        lines = csv.read_text().splitlines()
        assert lines[0] == "log_n,log_mse,stderr" and len(lines) == 4

    def test_rates_needs_list(self, tmp_path, capsys):
        code, _, err = _run(["rates", _scenario_file(tmp_path)], capsys)
        assert code == EXIT_INPUT and "n_list" in err

    def test_degenerate_rates(self, tmp_path, capsys, monkeypatch):
        import mellin_deconv.cli as cli
        from mellin_deconv.errors import DegenerateExperimentError

        def boom(*a, **kw):
            raise DegenerateExperimentError("risks must be positive")

        monkeypatch.setattr(cli, "rate_experiment", boom)
        text = json.loads(_scenario_file(tmp_path, n_list=[5, 6, 7]).read_text())
        del text["n"]
        p = tmp_path / "x.json"
        p.write_text(json.dumps(text))
        assert _run(["rates", p], capsys)[0] == EXIT_NUMERIC
