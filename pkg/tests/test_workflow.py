import numpy as np
import pytest

from dradapt.complexity import complexity_features
from dradapt.data import Dataset, synthetic_corpus
from dradapt.errors import PretrainError, ValidationError
from dradapt.workflow import (adaptive_optimize, benchmark, compare,
                              conventional_optimize, load_model_store,
                              predict_max_accuracy, pretrain, result_to_dict,
                              save_model_store, split_corpus, store_from_json,
                              store_to_json)

CHEAP_TECHS = ["pca", "mds-classical", "lle"]
KS = [5, 10]  # small neighborhoods keep the corpus datasets cheap


@pytest.fixture(scope="module")
def corpus():
    return synthetic_corpus(12, seed=77, n_range=(60, 90))


@pytest.fixture(scope="module")
def store(corpus):
    return pretrain(corpus[:10], CHEAP_TECHS, "tnc", budget=10, seed=5, ks=KS)


class TestPretrain:

    def test_store_shape(self, store):
        assert sorted(store.technique_ids) == sorted(CHEAP_TECHS)
        assert store.feature_arity == 3
        for tech in CHEAP_TECHS:
            assert store.model_for(tech).feature_arity == 3

    def test_small_corpus_rejected(self, corpus):
        with pytest.raises(PretrainError):
            pretrain(corpus[:3], CHEAP_TECHS, "tnc", budget=10, seed=5, ks=KS)

    def test_rerun_identical_json(self, corpus):
        a = pretrain(corpus[:10], ["pca", "mds-classical"], "tnc", budget=10,
                     seed=5, ks=KS)
        b = pretrain(corpus[:10], ["pca", "mds-classical"], "tnc", budget=10,
                     seed=5, ks=KS)
        assert store_to_json(a) == store_to_json(b)

    def test_workers_do_not_change_result(self, corpus):
        a = pretrain(corpus[:10], ["pca", "lle"], "tnc", budget=10, seed=5,
                     ks=KS, workers=1)
        b = pretrain(corpus[:10], ["pca", "lle"], "tnc", budget=10, seed=5,
                     ks=KS, workers=4)
        assert store_to_json(a) == store_to_json(b)

    def test_unfit_datasets_skipped(self, corpus):
        # a degenerate simplex has no distance variance: features fail, the
        # dataset is skipped, the rest survive
        bad = Dataset(points=np.eye(61) / np.sqrt(2.0), name="simplex")
        mixed = list(corpus[:10]) + [bad]
        store = pretrain(mixed, ["pca"], "tnc", budget=5, seed=5, ks=KS)
        assert "simplex" not in store.manifest["dataset_names"]
        assert len(store.manifest["dataset_names"]) == 10


class TestPredict:

    def test_one_prediction_per_technique(self, store, corpus):
        fv = complexity_features(corpus[10], KS)
        preds = predict_max_accuracy(store, fv)
        assert sorted(preds) == sorted(CHEAP_TECHS)

    def test_clamped_to_metric_range(self, store, corpus):
        preds = predict_max_accuracy(store, complexity_features(corpus[10], KS))
        assert all(0.0 <= v <= 1.0 for v in preds.values())

    def test_training_point_within_residual_envelope(self, store, corpus):
        # prediction for a training dataset stays within the model's own
        # worst training residual (plus slack for the clamp)
        feats = [complexity_features(ds, KS) for ds in corpus[:10]]
        for tech in CHEAP_TECHS:
            from dradapt.regress import predict_many
            model = store.model_for(tech)
            fitted = predict_many(model, [f.values for f in feats])
            preds = [predict_max_accuracy(store, f)[tech] for f in feats]
            for p, f in zip(preds, fitted):
                assert abs(p - np.clip(f, 0, 1)) <= 1e-12

    def test_arity_mismatch(self, store):
        with pytest.raises(ValidationError):
            predict_max_accuracy(store, np.ones(7))


class TestAdaptive:

    def test_top1_early_stop_when_prediction_low(self, store, corpus):
        ds = corpus[10]
        res = adaptive_optimize(ds, store, top_m=1, budget=10, seed=3)
        assert res.mode == "adaptive-top-1"
        assert len(res.chosen) == 1
        trace = res.traces[res.chosen[0]]
        if trace.stop_reason == "early-threshold":
            assert trace.best_score >= res.predictions[res.chosen[0]]

    def test_top3_does_at_least_top1_work(self, store, corpus):
        ds = corpus[11]
        r1 = adaptive_optimize(ds, store, top_m=1, budget=10, seed=3)
        r3 = adaptive_optimize(ds, store, top_m=3, budget=10, seed=3)
        assert r3.total_trials >= r1.total_trials
        assert r3.final_score >= r1.final_score - 1e-12

    def test_projection_matches_final_score(self, store, corpus):
        from dradapt.quality import score_projection
        ds = corpus[10]
        res = adaptive_optimize(ds, store, top_m=1, budget=10, seed=3)
        assert score_projection("tnc", ds, res.projection) == pytest.approx(
            res.final_score, abs=1e-12)

    def test_picks_pca_for_plane_data(self, corpus, rng):
        # 2-D data embedded isometrically in R^8: pca is provably perfect,
        # and the adaptive run must reach a near-perfect score
        latent = rng.standard_normal((80, 2))
        q, _ = np.linalg.qr(rng.standard_normal((8, 2)))
        plane = Dataset(points=latent @ q.T, name="plane80")
        train = list(corpus[:9]) + [plane]
        store = pretrain(train, CHEAP_TECHS, "tnc", budget=10, seed=5, ks=KS)
        res = adaptive_optimize(plane, store, top_m=3, budget=10, seed=4)
        assert "pca" in res.chosen
        assert res.final_score >= 0.99

    def test_top_m_validated(self, store, corpus):
        with pytest.raises(ValidationError):
            adaptive_optimize(corpus[10], store, top_m=9, budget=10, seed=1)


class TestConventional:

    def test_trial_arithmetic(self, store, corpus):
        # pca has an empty space (1 trial); every other space gets the budget
        res = conventional_optimize(corpus[10], CHEAP_TECHS, "tnc", budget=10,
                                    seed=3)
        assert res.total_trials == 2 * 10 + 1

    def test_result_is_max_over_traces(self, store, corpus):
        res = conventional_optimize(corpus[10], CHEAP_TECHS, "tnc", budget=10,
                                    seed=3)
        assert res.final_score == max(t.best_score for t in res.traces.values())

    def test_deterministic(self, corpus):
        a = conventional_optimize(corpus[10], CHEAP_TECHS, "tnc", budget=10, seed=3)
        b = conventional_optimize(corpus[10], CHEAP_TECHS, "tnc", budget=10, seed=3)
        assert result_to_dict(a) == result_to_dict(b)

    def test_empty_technique_list(self, corpus):
        with pytest.raises(ValidationError):
            conventional_optimize(corpus[10], [], "tnc", budget=10, seed=3)


class TestCompare:

    def test_ratios_and_delta(self, store, corpus):
        ds = corpus[10]
        conv = conventional_optimize(ds, CHEAP_TECHS, "tnc", budget=10, seed=3)
        adap = adaptive_optimize(ds, store, top_m=1, budget=10, seed=3)
        rep = compare(adap, conv)
        assert rep.trial_count_ratio <= 1.0
        assert rep.accuracy_delta == adap.final_score - conv.final_score

    def test_self_comparison_trivial(self, store, corpus):
        conv = conventional_optimize(corpus[10], CHEAP_TECHS, "tnc", budget=10,
                                     seed=3)
        rep = compare(conv, conv)
        assert rep.accuracy_delta == 0.0
        assert rep.trial_count_ratio == 1.0

    def test_metric_mismatch_rejected(self, store, corpus):
        conv = conventional_optimize(corpus[10], ["pca"], "tnc", budget=10, seed=3)
        adap = adaptive_optimize(corpus[10], store, top_m=1, budget=10, seed=3)
        conv.metric = "pearson"
        with pytest.raises(ValidationError):
            compare(adap, conv)


class TestStoreSerialization:

    def test_json_round_trip(self, store, tmp_path):
        text = store_to_json(store)
        assert store_to_json(store_from_json(text)) == text
        path = tmp_path / "store.json"
        save_model_store(store, path)
        assert store_to_json(load_model_store(path)) == text

    def test_bad_schema_rejected(self):
        with pytest.raises(ValidationError):
            store_from_json('{"schema": "other/9", "models": {}}')


class TestSplitAndBenchmark:

    def test_split_fractions(self, corpus):
        train, test = split_corpus(corpus, 0.8, seed=1)
        assert len(train) == 10 and len(test) == 2
        assert {ds.name for ds in train}.isdisjoint({ds.name for ds in test})

    def test_benchmark_report_shape(self, corpus):
        report = benchmark(corpus, CHEAP_TECHS, "tnc", budget=10, seed=5,
                           split=10 / 12, ks=KS)
        assert len(report["test_datasets"]) == 2
        assert len(report["results"]) == 2
        for row in report["results"]:
            assert row["compare_top1"]["trial_count_ratio"] <= 1.0
        assert len(report["summary_table"]) == 2
        assert "mean_accuracy_delta_top1" in report["summary"]
