import csv
import json

import numpy as np
import pytest

from walshlab import harness
from walshlab.cli import build_parser, load_instance, main, parse_p_grid
from walshlab.dyadic import Bitile, BitileCollection, ResolutionError
from walshlab.io import (
    read_bitiles,
    read_choice,
    read_scenario,
    read_signal,
    write_bitiles,
    write_choice,
    write_scenario,
    write_signal,
)
from walshlab.walsh import fwht


class TestIO:
    def test_signal_roundtrip(self, tmp_path, rng):
        f = rng.standard_normal(16)
        write_signal(tmp_path / "f.signal", f)
        g, spec = read_signal(tmp_path / "f.signal")
        assert not spec and np.array_equal(f, g)
        write_signal(tmp_path / "c.spec", fwht(f), spectrum=True)
        c, spec = read_signal(tmp_path / "c.spec")
        assert spec and np.array_equal(c, fwht(f))
        assert (tmp_path / "f.signal").read_text().splitlines()[0] == "4"

    def test_signal_length_checked(self, tmp_path):
        (tmp_path / "bad").write_text("3\n1\n2\n")
        with pytest.raises(ResolutionError):
            read_signal(tmp_path / "bad")

    def test_choice_roundtrip(self, tmp_path, rng):
        N = rng.integers(0, 9, 8)
        write_choice(tmp_path / "n", N)
        assert np.array_equal(read_choice(tmp_path / "n"), N)

    def test_bitiles_roundtrip(self, tmp_path):
        S = BitileCollection([Bitile(0, 0, 1), Bitile(-2, 3, 0), Bitile(-3, 5, 0)], 3)
        eps = {Bitile(0, 0, 1): -1, Bitile(-2, 3, 0): 0, Bitile(-3, 5, 0): 1}
        write_bitiles(tmp_path / "s", S, eps)
        T, signs = read_bitiles(tmp_path / "s")
        assert T == S and signs == eps
        assert "0 0 1 -1" in (tmp_path / "s").read_text()
        write_bitiles(tmp_path / "t", S)
        T, signs = read_bitiles(tmp_path / "t")
        assert T == S and signs is None

    def test_scenario_paths_resolved(self, tmp_path):
        write_scenario(tmp_path / "sc.json", {"signal": "f.signal", "p": 1.5, "G": [0, 1]})
        sc = read_scenario(tmp_path / "sc.json")
        assert sc["signal"] == str(tmp_path / "f.signal") and sc["p"] == 1.5


class TestCLI:
    def test_p_grid(self):
        assert parse_p_grid("1.1:2:4") == (1.1, 1.4, 1.7, 2.0)
        assert parse_p_grid("1.05,2") == (1.05, 2.0)

    def test_subcommands_registered(self):
        parser = build_parser()
        for cmd in ["transform", "carleson", "sweep", "mixed", "decompose", "verify-cz", "pipeline", "lacunary", "zygmund"]:
            assert parser.parse_args([cmd] + (["--input", "x"] if cmd in ("transform", "carleson") else []) + (["--scenario", "x"] if cmd in ("decompose", "verify-cz") else [])).command == cmd

    def test_subcommand_defaults_independent(self):
        parser = build_parser()
        assert parser.parse_args(["pipeline"]).p_grid == "1.1,1.25,1.5,2"
        assert parser.parse_args(["sweep"]).p_grid == "1.05,1.1,1.2,1.35,1.5,1.75,2"
        assert parser.parse_args(["mixed"]).resolution == 10

    def test_transform(self, tmp_path, rng):
        write_signal(tmp_path / "f", rng.standard_normal(32))
        assert main(["transform", "--input", str(tmp_path / "f"), "--out", str(tmp_path / "c")]) == 0
        c, spec = read_signal(tmp_path / "c")
        assert spec
        assert main(["transform", "--input", str(tmp_path / "c"), "--out", str(tmp_path / "g")]) == 0
        assert np.allclose(read_signal(tmp_path / "g")[0], read_signal(tmp_path / "f")[0])

    def test_carleson(self, tmp_path):
        write_signal(tmp_path / "f", np.array([1.0, -1, -1, 1]))
        assert main(["carleson", "--input", str(tmp_path / "f"), "--out", str(tmp_path / "w.csv")]) == 0
        rows = list(csv.DictReader(open(tmp_path / "w.csv")))
        assert [float(r["Wf"]) for r in rows] == [1.0] * 4

    def test_sweep_outputs(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "-M", "6", "--family", "spike+indicator", "--p-grid", "1.1,1.5,2", "--out", str(out), "--plot", str(tmp_path / "s.gp")])
        assert code == 0
        assert out.read_text().startswith("p,familyId,inputNorm,weakNorm,ratio,growthPredicted,slack")
        assert (tmp_path / "sweep.summary.csv").exists() and (tmp_path / "s.gp").exists()

    def test_sweep_deterministic(self, tmp_path):
        for name in ("a.csv", "b.csv"):
            main(["sweep", "-M", "5", "--seed", "3", "--out", str(tmp_path / name)])
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_sweep_budget_failure(self, tmp_path):
        assert main(["sweep", "-M", "5", "--budget", "restricted=0.001", "--out", str(tmp_path / "x.csv")]) == 1

    def test_floor_and_bad_budget(self):
        with pytest.raises(SystemExit):
            main(["sweep", "--p-grid", "1.001,2"])
        assert main(["sweep", "--budget", "nonsense=1"]) == 2

    def test_mixed(self, tmp_path):
        assert main(["mixed", "-M", "6", "--out", str(tmp_path / "m.csv")]) == 0

    def test_lacunary_and_zygmund(self, tmp_path):
        assert main(["lacunary", "-M", "6", "--out", str(tmp_path / "l.csv")]) == 0
        assert (tmp_path / "l.summary.csv").exists()
        assert main(["zygmund", "-M", "6", "--out", str(tmp_path / "z.csv")]) == 0

    def test_pipeline_and_scenarios(self, tmp_path):
        out = tmp_path / "p.csv"
        assert main(["pipeline", "--trials", "8", "--resolutions", "5,6", "--out", str(out)]) == 0
        rows = list(csv.DictReader(open(out)))
        assert len(rows) == 8 and all(r["failure"] == "" for r in rows)
        # replay one instance through the scenario commands
        inst = harness.trial_instance((6,), (1.5,), 123)
        path = harness.dump_scenario(inst, tmp_path, "replay")
        again = load_instance(path)
        assert np.array_equal(again.f, inst.f) and again.S == inst.S and np.array_equal(again.G, inst.G)
        assert (again.eps or None) == (inst.eps or None) or inst.eps is None
        assert main(["decompose", "--scenario", str(path), "--out", str(tmp_path / "d.csv")]) == 0
        header = (tmp_path / "d.csv").read_text().splitlines()[0]
        assert header == "delta,numTrees,tops,topsRatio,czL2,czRatio,pairingRatio"
        assert main(["verify-cz", "--scenario", str(path)]) == 0

    def test_scenario_defaults(self, tmp_path, rng):
        write_signal(tmp_path / "f", rng.standard_normal(16))
        (tmp_path / "s.json").write_text(json.dumps({"signal": "f", "p": 1.25, "G": [0, 3, 5, 9]}))
        inst = load_instance(tmp_path / "s.json")
        assert inst.S == BitileCollection.full(4) and inst.G.sum() == 4
        assert main(["verify-cz", "--scenario", str(tmp_path / "s.json")]) == 0

    def test_pipeline_failure_exit(self, tmp_path, monkeypatch):
        monkeypatch.setattr(harness, "coefficient_defect", lambda *a: 1.0)
        assert main(["pipeline", "--trials", "5", "-M", "5", "--out", str(tmp_path / "p.csv")]) == 1
        assert list(tmp_path.glob("trial*.json"))
