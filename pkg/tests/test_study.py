"""Model-comparison simulation study: configuration, execution,
determinism, and CSV output."""

import json

import numpy as np
import pytest

import netkernel as nk
from netkernel.errors import FileFormatError, InvalidParamsError
from netkernel.study import (REPLICATES_HEADER, SUMMARY_HEADER, StudyConfig,
                             TrueParams, config_to_json,
                             parse_network_source, run_sim_study,
                             study_config_from_json, write_replicates_csv,
                             write_summary_csv)

TRUE = TrueParams(sigma2=0.9, c_S=60.0, c_T=0.2, nugget=0.1)


def tiny_config(**kw):
    base = dict(
        network=nk.generate("river_tree", {"depth": 3}, seed=5),
        n_sites=5, times_per_site=2, true_params=TRUE, n_replicates=3,
        models=("T", "C2"), seed=101)
    base.update(kw)
    return StudyConfig(**base)


@pytest.fixture(scope="module")
def tiny_result():
    return run_sim_study(tiny_config())


class TestConfigValidation:
    @pytest.mark.parametrize("kw", [
        dict(n_sites=1), dict(times_per_site=0), dict(n_replicates=0),
        dict(models=()), dict(models=("T", "T")), dict(models=("T", "C7")),
        dict(n_starts=0),
    ])
    def test_rejected(self, kw):
        with pytest.raises(InvalidParamsError):
            tiny_config(**kw)

    def test_true_params_checked(self):
        with pytest.raises(InvalidParamsError):
            TrueParams(sigma2=0.0, c_S=1.0, c_T=1.0, nugget=0.0)
        with pytest.raises(InvalidParamsError):
            TrueParams(sigma2=1.0, c_S=1.0, c_T=1.0, nugget=-0.1)

    def test_with_seed(self):
        cfg = tiny_config(seed=None)
        assert cfg.with_seed(7).seed == 7

    def test_unseeded_study_refuses_to_run(self):
        with pytest.raises(InvalidParamsError):
            run_sim_study(tiny_config(seed=None))

    def test_bad_thread_count(self):
        with pytest.raises(InvalidParamsError):
            run_sim_study(tiny_config(), threads=0)


class TestRun:
    def test_record_shape(self, tiny_result):
        assert len(tiny_result.records) == 3 * 2
        for rec in tiny_result.records:
            assert rec.model in ("T", "C2")
            assert rec.sigma2 > 0 and rec.c_S > 0 and rec.c_T > 0
            assert np.isfinite(rec.loglik)

    def test_exactly_one_winner_per_replicate(self, tiny_result):
        for r in range(3):
            winners = [rec for rec in tiny_result.records
                       if rec.replicate == r and rec.winner]
            assert len(winners) == 1

    def test_wins_partition_replicates(self, tiny_result):
        assert sum(s.wins for s in tiny_result.summaries) == 3
        total = sum(s.win_proportion for s in tiny_result.summaries)
        assert total == pytest.approx(1.0)

    def test_mae_never_exceeds_rmse(self, tiny_result):
        for s in tiny_result.summaries:
            for p in ("sigma2", "c_S", "c_T"):
                assert s.mae[p] <= s.rmse[p] + 1e-12

    def test_accessors(self, tiny_result):
        s = tiny_result.summary_for("T")
        assert s.model == "T" and s.n_replicates == 3
        assert tiny_result.win_proportion("T") == s.win_proportion
        assert tiny_result.estimates("T", "c_S").shape == (3,)
        with pytest.raises(KeyError):
            tiny_result.summary_for("C1")
        with pytest.raises(KeyError):
            tiny_result.estimates("T", "loglik")

    def test_thread_count_does_not_change_results(self, tiny_result):
        threaded = run_sim_study(tiny_config(), threads=3)
        assert threaded.records == tiny_result.records
        assert threaded.summaries == tiny_result.summaries

    def test_seed_changes_results(self, tiny_result):
        other = run_sim_study(tiny_config(seed=102))
        assert other.records != tiny_result.records

    def test_replicate_records_do_not_depend_on_total_count(self,
                                                            tiny_result):
        shorter = run_sim_study(tiny_config(n_replicates=2))
        assert shorter.records == tuple(
            rec for rec in tiny_result.records if rec.replicate < 2)

    def test_fix_times_changes_draws_but_stays_deterministic(self):
        fixed_a = run_sim_study(tiny_config(fix_times=True))
        fixed_b = run_sim_study(tiny_config(fix_times=True))
        free = run_sim_study(tiny_config())
        assert fixed_a.records == fixed_b.records
        assert fixed_a.records != free.records


class TestCsv:
    def test_replicates_file(self, tiny_result, tmp_path):
        path = tmp_path / "replicates.csv"
        write_replicates_csv(tiny_result, path)
        lines = path.read_text().splitlines()
        assert lines[0] == REPLICATES_HEADER
        assert len(lines) == 1 + len(tiny_result.records)
        first = lines[1].split(",")
        rec = tiny_result.records[0]
        assert first[0] == "0" and first[1] == rec.model
        # 17-significant-digit floats round-trip exactly
        assert float(first[2]) == rec.loglik
        assert float(first[3]) == rec.sigma2
        assert first[6] in ("0", "1") and first[8] in ("0", "1")

    def test_summary_file(self, tiny_result, tmp_path):
        path = tmp_path / "summary.csv"
        write_summary_csv(tiny_result, path)
        lines = path.read_text().splitlines()
        assert lines[0] == SUMMARY_HEADER
        assert len(lines) == 1 + 2
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        s = tiny_result.summaries[0]
        assert row["model"] == s.model
        assert float(row["win_proportion"]) == s.win_proportion
        assert float(row["mae_c_S"]) == s.mae["c_S"]

    def test_byte_identical_across_threads(self, tiny_result, tmp_path):
        threaded = run_sim_study(tiny_config(), threads=2)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_replicates_csv(tiny_result, a)
        write_replicates_csv(threaded, b)
        assert a.read_bytes() == b.read_bytes()


class TestConfigJson:
    BASE = {
        "network": {"generate": {"kind": "river_tree",
                                 "params": {"depth": 3}, "seed": 5}},
        "n_sites": 5,
        "times_per_site": 2,
        "true": {"sigma2": 0.9, "c_S": 60.0, "c_T": 0.2, "nugget": 0.1},
        "n_replicates": 3,
        "models": ["T", "C2"],
        "seed": 101,
    }

    def test_parse_matches_programmatic(self):
        cfg = study_config_from_json(self.BASE)
        want = tiny_config()
        assert cfg.network.content_key == want.network.content_key
        assert cfg.true_params == want.true_params
        assert cfg.models == want.models
        assert cfg.seed == 101 and cfg.n_starts == 1 and not cfg.fix_times

    def test_round_trip_through_json(self):
        cfg = study_config_from_json(self.BASE)
        again = study_config_from_json(config_to_json(cfg))
        assert again.network.content_key == cfg.network.content_key
        assert config_to_json(again) == config_to_json(cfg)

    def test_defaults(self):
        obj = {k: v for k, v in self.BASE.items() if k != "models"}
        obj["true"] = {"sigma2": 0.9, "c_S": 60.0, "c_T": 0.2}
        cfg = study_config_from_json(obj)
        assert cfg.models == ("T", "C1", "C2")
        assert cfg.true_params.nugget == 0.0

    def test_seed_may_be_omitted(self):
        obj = {k: v for k, v in self.BASE.items() if k != "seed"}
        cfg = study_config_from_json(obj)
        assert cfg.seed is None

    @pytest.mark.parametrize("mutate", [
        lambda o: o.update(extra=1),
        lambda o: o.pop("n_sites"),
        lambda o: o.pop("true"),
        lambda o: o.update(seed="abc"),
        lambda o: o.update(models="T"),
        lambda o: o["true"].update(mean=0.0),
        lambda o: o.update(network={}),
        lambda o: o.update(network={"generate": {"kind": "river_tree"},
                                    "file": "x.json"}),
        lambda o: o.update(network={"generate": {"kind": "hexgrid"}}),
    ])
    def test_strict_parsing(self, mutate):
        obj = json.loads(json.dumps(self.BASE))
        mutate(obj)
        with pytest.raises(FileFormatError):
            study_config_from_json(obj)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "study.json"
        path.write_text(json.dumps(self.BASE))
        cfg = nk.load_study_config(path)
        assert cfg.n_replicates == 3

    def test_load_bad_json(self, tmp_path):
        path = tmp_path / "study.json"
        path.write_text("{nope")
        with pytest.raises(FileFormatError):
            nk.load_study_config(path)


class TestNetworkSource:
    def test_generate_recipe_replayable(self):
        obj = {"generate": {"kind": "random_tree", "params": {"n": 9},
                            "seed": 4}}
        net1, recipe = parse_network_source(obj, default_seed=0)
        net2, _ = parse_network_source(recipe, default_seed=99)
        assert net1.content_key == net2.content_key
        assert recipe["generate"]["seed"] == 4

    def test_default_seed_applied(self):
        obj = {"generate": {"kind": "random_tree", "params": {"n": 9}}}
        _, recipe = parse_network_source(obj, default_seed=42)
        assert recipe["generate"]["seed"] == 42

    def test_file_source(self, tmp_path, triangle):
        path = tmp_path / "net.json"
        nk.save_network(triangle, path)
        net, recipe = parse_network_source({"file": str(path)}, 0)
        assert net.content_key == triangle.content_key
        assert recipe == {"file": str(path)}
