import numpy as np
import pytest

from walshlab import harness
from walshlab.harness import (
    ExperimentConfig,
    Instance,
    SweepRow,
    carleson_sweep,
    generate_family,
    mixed_bound_check,
    mixed_row,
    nested_spikes,
    pipeline_verify,
    rows_to_csv,
    run_instance,
)
from walshlab.dyadic import BitileCollection
from walshlab.lacunary import lacunary_norm_scan
from walshlab.walsh import argmax_choice, walsh_character


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.budgets["tops"] == 8 and cfg.budgets["cz"] == 100
        assert cfg.budgets["tree"] == 50 and cfg.budgets["forest"] == 50

    @pytest.mark.parametrize(
        "kwargs", [{"p_grid": (1.0, 1.5)}, {"p_grid": (2.5,)}, {"p_grid": ()}, {"trials": 0}, {"resolution": 15}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ExperimentConfig(**kwargs)

    def test_budget_override_keeps_rest(self):
        cfg = ExperimentConfig(budgets={"cz": 5.0})
        assert cfg.budgets["cz"] == 5.0 and cfg.budgets["tops"] == 8.0


class TestFamilies:
    def test_indicator_measure(self):
        fam = generate_family("indicator:measure=2^-3,count=1", 6, 0)
        assert len(fam) == 1
        f = fam[0][1]
        assert set(np.unique(f)) == {0.0, 1.0} and f.sum() == 8

    def test_single_packet(self):
        (fid, f), = generate_family("single-packet:j=0,k=0,n=5", 4, 0)
        assert np.array_equal(f, walsh_character(5, 4))

    def test_spikes(self):
        fam = generate_family("spike", 5, 1)
        assert len(fam) == 6
        for k, (_, f) in enumerate(fam):
            assert f.max() == 2**k and np.mean(f) == 1

    def test_deterministic(self):
        spec = "indicator+random-sign+spike+multispike+single-packet+constant"
        a, b = generate_family(spec, 6, 42), generate_family(spec, 6, 42)
        assert [i for i, _ in a] == [i for i, _ in b]
        assert all(np.array_equal(x, y) for (_, x), (_, y) in zip(a, b))
        c = generate_family(spec, 6, 43)
        assert any(not np.array_equal(x, y) for (_, x), (_, y) in zip(a, c))

    def test_unknown(self):
        with pytest.raises(ValueError):
            generate_family("gaussian", 4, 0)
        with pytest.raises(ValueError):
            generate_family("indicator:measure", 4, 0)


class TestSweep:
    def test_row_consistency(self):
        assert SweepRow(1.5, "x", 2.0, 3.0, 1.5, 2.0, 0.5).consistent()
        assert not SweepRow(1.5, "x", 2.0, 3.0, 1.6, 2.0, 0.4).consistent()

    def test_constant_family_degenerate(self):
        res = carleson_sweep(ExperimentConfig(resolution=5, family="constant", p_grid=(1.1, 1.5, 2.0)))
        assert all(r.ratio == pytest.approx(1.0) for r in res.rows)
        assert res.fit.degenerate

    def test_walsh_character_family(self):
        cfg = ExperimentConfig(resolution=5, family="single-packet:j=0,k=0,n=13", p_grid=(1.05, 1.5, 2.0))
        res = carleson_sweep(cfg)
        assert all(r.ratio <= 1 + 1e-9 for r in res.rows)

    def test_rows_consistent_and_restricted(self):
        res = carleson_sweep(ExperimentConfig(resolution=6, family="spike+indicator", p_grid=(1.1, 1.5, 2.0)))
        assert all(r.consistent() for r in res.rows)
        assert res.restricted is not None and res.restricted <= 10
        assert all(r.slack >= -1e-12 for r in res.rows)

    def test_dominates_lacunary_scan(self):
        cfg = ExperimentConfig(resolution=6, family="indicator:count=1+random-sign:count=3", p_grid=(1.1, 1.5, 2.0))
        fam = generate_family(cfg.family, 6, 0)
        full = carleson_sweep(cfg, fam)
        lac = lacunary_norm_scan([1, 2, 5, 11, 23, 64], cfg.p_grid, fam)
        for a, b in zip(full.maxima, (s["maxRatio"] for s in lac.summary)):
            assert a >= b - 1e-12

    def test_csv_deterministic(self):
        cfg = ExperimentConfig(resolution=5, family="spike+indicator", seed=7)
        a = rows_to_csv([r.as_dict() for r in carleson_sweep(cfg).rows])
        b = rows_to_csv([r.as_dict() for r in carleson_sweep(cfg).rows])
        assert a == b and a.startswith("p,familyId,inputNorm,weakNorm,ratio,growthPredicted,slack\n")


class TestMixed:
    def test_constant(self):
        assert mixed_row("c", np.ones(16)).ratio <= 1 + 1e-12

    def test_tallest_spike_finite(self):
        f = np.zeros(256)
        f[0] = 256
        r = mixed_row("s", f)
        assert np.isfinite(r.ratio) and r.ratio <= r.implied

    def test_check(self):
        res = mixed_bound_check(ExperimentConfig(resolution=7))
        assert res.derivation_ok and res.nested_monotone
        assert len(res.nested) == 8
        assert all(f.mean() == pytest.approx(1.0) for f in nested_spikes(7))


class TestPipeline:
    def test_zero_signal(self):
        M = 5
        inst = Instance(np.zeros(32), BitileCollection.full(M), None, np.zeros(32, dtype=int), np.ones(32, dtype=bool), 1.5)
        rep = run_instance(inst)
        assert rep.failure is None and all(d.pairing == 0 for d in rep.deltas)

    def test_empty_exceptional_set(self):
        M = 5
        f = np.ones(32)
        inst = Instance(f, BitileCollection.full(M), None, argmax_choice(f), np.ones(32, dtype=bool), 1.25)
        rep = run_instance(inst)
        assert rep.measure_E == 0 and rep.max_defect == 0

    def test_small_suite_clean_and_deterministic(self):
        cfg = ExperimentConfig(resolution=6, trials=25, seed=3)
        a = pipeline_verify(cfg, (5, 6))
        b = pipeline_verify(cfg, (5, 6))
        assert a.clean and all(a.budgets_hold(cfg.budgets).values())
        assert rows_to_csv([t.as_dict() for t in a.trials]) == rows_to_csv([t.as_dict() for t in b.trials])

    def test_workers_match_serial(self):
        serial = pipeline_verify(ExperimentConfig(resolution=5, trials=6, seed=9))
        pooled = pipeline_verify(ExperimentConfig(resolution=5, trials=6, seed=9, workers=2))
        assert rows_to_csv([t.as_dict() for t in serial.trials]) == rows_to_csv([t.as_dict() for t in pooled.trials])

    def test_failure_dumps_reproducer(self, tmp_path, monkeypatch):
        monkeypatch.setattr(harness, "coefficient_defect", lambda *a: 1.0)
        res = pipeline_verify(ExperimentConfig(resolution=5, trials=40, seed=1), dump_dir=tmp_path)
        assert not res.clean and "coefficient defect" in res.failures[0]
        assert res.reproducer is not None and (tmp_path / res.reproducer.split("/")[-1]).exists()
        assert len(res.trials) <= 40


def test_gnuplot_script():
    text = harness.gnuplot_script("s.csv", "p", "maxRatio", "t")
    assert "plot 's.csv'" in text and "logscale" in text
