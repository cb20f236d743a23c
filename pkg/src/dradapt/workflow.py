"""Workflow orchestration: pretraining, technique ranking, early-terminated
optimization, the conventional full-budget baseline, and comparison reports.

Pretraining computes, for every corpus dataset, the complexity feature
vector and the best score each technique reaches under full-budget Bayesian
optimization, then fits one regression model per technique mapping features
to that best score. On a new dataset the models rank techniques; the
adaptive run optimizes only the top-m of them, stopping early once the
prediction is reached. The conventional baseline optimizes every technique
with the full budget and no early stop.
"""

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .complexity import DEFAULT_KS, FeatureVector, complexity_features
from .data import Dataset
from .drtech import get_technique, hyperparameter_space, project
from .errors import DradaptError, PretrainError, ValidationError, WorkflowError
from .optimize import (DEFAULT_BUDGET, NO_STOP, OptimizationTrace,
                       bayes_optimize, make_threshold_stop)
from .quality import DEFAULT_EVAL_K, ProjectionScorer, metric_range
from .regress import fit, model_from_record, model_to_record, predict
from .seeding import derive_seed

log = logging.getLogger(__name__)

STORE_SCHEMA = "dradapt-modelstore/1"
MIN_CORPUS = 10
MIN_SURVIVORS = 5


@dataclass
class ModelStore:
    """Per-technique regression models plus the manifest they were built from."""

    metric: str
    feature_ks: list
    models: dict  # technique id -> {metric id -> RegressionModel}
    manifest: dict

    @property
    def technique_ids(self) -> list:
        return list(self.models)

    @property
    def feature_arity(self) -> int:
        return 1 + len(self.feature_ks)

    def model_for(self, technique_id: str):
        return self.models[technique_id][self.metric]


@dataclass
class WorkflowResult:
    mode: str  # "conventional" | "adaptive-top-m"
    dataset: str
    metric: str
    chosen: list
    traces: dict  # technique id -> OptimizationTrace
    best_technique: str
    best_assignment: dict
    final_score: float
    projection: np.ndarray
    wall_time: float
    predictions: dict | None = None
    failures: dict = field(default_factory=dict)

    @property
    def total_trials(self) -> int:
        return sum(len(t.trials) for t in self.traces.values())


@dataclass
class ComparisonReport:
    dataset: str
    metric: str
    accuracy_delta: float  # adaptive final - conventional final
    wall_time_ratio: float
    trial_count_ratio: float
    adaptive: WorkflowResult
    conventional: WorkflowResult


def make_objective(ds: Dataset, technique, metric: str, k: int = DEFAULT_EVAL_K):
    """Objective closure scoring ``technique``'s projection of ``ds``."""
    desc = get_technique(technique)
    scorer = ProjectionScorer(ds, metric, k)

    def objective(assignment, seed):
        return scorer(project(desc, ds, assignment, seed).points)

    return objective


def corpus_hash(corpus) -> str:
    h = hashlib.sha256()
    for ds in corpus:
        h.update(ds.content_hash().encode())
    return h.hexdigest()


def _optimize_technique(ds, tech_id, metric, budget, seed, stop, k):
    objective = make_objective(ds, tech_id, metric, k)
    space = hyperparameter_space(tech_id, ds.n)
    return bayes_optimize(objective, space, budget=budget, seed=seed, stop=stop)


def pretrain(corpus, techniques, metric: str, budget: int = DEFAULT_BUDGET,
             seed: int = 0, regression: str = "random-forest",
             ks=DEFAULT_KS, k_eval: int = DEFAULT_EVAL_K,
             workers: int | None = None) -> ModelStore:
    """Build a ModelStore from a corpus of datasets.

    Datasets failing feature extraction or optimization are logged and
    skipped; fewer than 5 survivors (or a corpus below 10) is an error.
    """
    corpus = list(corpus)
    if len(corpus) < MIN_CORPUS:
        raise PretrainError(f"corpus must have >= {MIN_CORPUS} datasets, got {len(corpus)}")
    metric_range(metric)  # validates the id
    tech_ids = [get_technique(t).id for t in techniques]
    if not tech_ids:
        raise ValidationError("need at least one technique")

    def best_score(i_ds):
        i, ds = i_ds
        feats = complexity_features(ds, ks)
        scores = {}
        for tech in tech_ids:
            trace = _optimize_technique(
                ds, tech, metric, budget,
                derive_seed(seed, "pretrain", i, tech), NO_STOP, k_eval)
            scores[tech] = trace.best_score
        return feats, scores

    survivors: list[tuple[FeatureVector, dict]] = []
    names = []
    with ThreadPoolExecutor(max_workers=workers or 1) as pool:
        futures = [(ds, pool.submit(best_score, (i, ds)))
                   for i, ds in enumerate(corpus)]
        for ds, fut in futures:
            try:
                survivors.append(fut.result())
                names.append(ds.name)
            except DradaptError as exc:
                log.warning("skipping dataset %s: %s", ds.name, exc)
    if len(survivors) < MIN_SURVIVORS:
        raise PretrainError(
            f"only {len(survivors)} datasets survived pretraining; need {MIN_SURVIVORS}")

    feature_rows = [feats.values for feats, _ in survivors]
    models = {}
    for tech in tech_ids:
        y = [scores[tech] for _, scores in survivors]
        models[tech] = {metric: fit(regression, feature_rows, y,
                                    seed=derive_seed(seed, "fit", tech))}
    manifest = {
        "corpus_hash": corpus_hash(corpus),
        "dataset_names": names,
        "feature_ks": [int(k) for k in ks],
        "metric": metric,
        "techniques": tech_ids,
        "budget": int(budget),
        "seed": int(seed),
        "regression": regression,
        "k_eval": int(k_eval),
    }
    return ModelStore(metric=metric, feature_ks=[int(k) for k in ks],
                      models=models, manifest=manifest)


def predict_max_accuracy(store: ModelStore, features: FeatureVector) -> dict:
    """Per-technique predicted maximum accuracy, clamped to the metric range."""
    values = features.values if isinstance(features, FeatureVector) else np.asarray(features)
    if values.shape != (store.feature_arity,):
        raise ValidationError(
            f"feature arity {values.shape} does not match store arity {store.feature_arity}")
    lo, hi = metric_range(store.metric)
    return {tech: float(np.clip(predict(store.model_for(tech), values), lo, hi))
            for tech in store.technique_ids}


def _best_of(traces: dict, ds, metric) -> tuple[str, OptimizationTrace]:
    best_tech = max(traces, key=lambda t: (traces[t].best_score, t))
    return best_tech, traces[best_tech]


def _assemble(mode, ds, metric, traces, failures, seed, predictions=None) -> WorkflowResult:
    if not traces:
        raise WorkflowError(
            f"every technique failed on {ds.name}: {failures}")
    best_tech, best_trace = _best_of(traces, ds, metric)
    best = best_trace.best_trial
    proj = project(best_tech, ds, best.assignment, best.seed)
    return WorkflowResult(
        mode=mode, dataset=ds.name, metric=metric,
        chosen=list(traces), traces=traces,
        best_technique=best_tech, best_assignment=best.assignment,
        final_score=best_trace.best_score, projection=proj.points,
        wall_time=sum(t.wall_time for t in traces.values()),
        predictions=predictions, failures=failures)


def adaptive_optimize(ds: Dataset, store: ModelStore, top_m: int = 1,
                      budget: int = DEFAULT_BUDGET, seed: int = 0,
                      threshold_fraction: float = 1.0,
                      k_eval: int | None = None,
                      workers: int | None = None) -> WorkflowResult:
    """Rank techniques by predicted maximum accuracy and optimize the top m,
    early-stopping each at its (fraction-scaled) prediction."""
    if not store.technique_ids:
        raise ValidationError("model store is empty")
    if not 1 <= top_m <= len(store.technique_ids):
        raise ValidationError(
            f"top_m={top_m} must be in [1, {len(store.technique_ids)}]")
    k_eval = k_eval if k_eval is not None else store.manifest.get("k_eval", DEFAULT_EVAL_K)
    features = complexity_features(ds, store.feature_ks)
    predictions = predict_max_accuracy(store, features)
    ranked = sorted(predictions, key=lambda t: (-predictions[t], t))
    selected = ranked[:top_m]

    def run(tech):
        stop = make_threshold_stop(predictions[tech] * threshold_fraction)
        return _optimize_technique(ds, tech, store.metric, budget,
                                   derive_seed(seed, "adaptive", tech), stop, k_eval)

    traces, failures = {}, {}
    with ThreadPoolExecutor(max_workers=workers or 1) as pool:
        futures = {tech: pool.submit(run, tech) for tech in selected}
        for tech in selected:
            try:
                traces[tech] = futures[tech].result()
            except DradaptError as exc:
                failures[tech] = str(exc)
    return _assemble(f"adaptive-top-{top_m}", ds, store.metric, traces,
                     failures, seed, predictions)


def conventional_optimize(ds: Dataset, techniques, metric: str,
                          budget: int = DEFAULT_BUDGET, seed: int = 0,
                          k_eval: int = DEFAULT_EVAL_K,
                          workers: int | None = None) -> WorkflowResult:
    """Full-budget optimization of every technique; no early stop."""
    tech_ids = [get_technique(t).id for t in techniques]
    if not tech_ids:
        raise ValidationError("need at least one technique")
    metric_range(metric)

    def run(tech):
        return _optimize_technique(ds, tech, metric, budget,
                                   derive_seed(seed, "conventional", tech),
                                   NO_STOP, k_eval)

    traces, failures = {}, {}
    with ThreadPoolExecutor(max_workers=workers or 1) as pool:
        futures = {tech: pool.submit(run, tech) for tech in tech_ids}
        for tech in tech_ids:
            try:
                traces[tech] = futures[tech].result()
            except DradaptError as exc:
                failures[tech] = str(exc)
    return _assemble("conventional", ds, metric, traces, failures, seed)


def compare(adaptive: WorkflowResult, conventional: WorkflowResult) -> ComparisonReport:
    """Accuracy and cost deltas of an adaptive run against the baseline."""
    if adaptive.metric != conventional.metric:
        raise ValidationError(
            f"metric mismatch: {adaptive.metric} vs {conventional.metric}")
    if adaptive.dataset != conventional.dataset:
        raise ValidationError(
            f"dataset mismatch: {adaptive.dataset} vs {conventional.dataset}")
    conv_wall = conventional.wall_time
    conv_trials = conventional.total_trials
    return ComparisonReport(
        dataset=adaptive.dataset, metric=adaptive.metric,
        accuracy_delta=adaptive.final_score - conventional.final_score,
        wall_time_ratio=adaptive.wall_time / conv_wall if conv_wall > 0 else float("nan"),
        trial_count_ratio=adaptive.total_trials / conv_trials if conv_trials else float("nan"),
        adaptive=adaptive, conventional=conventional)


# ---------------------------------------------------------------------------
# report serialization

def result_to_dict(result: WorkflowResult, include_timings: bool = False) -> dict:
    from .optimize import trace_to_records

    doc = {
        "mode": result.mode,
        "dataset": result.dataset,
        "metric": result.metric,
        "chosen": result.chosen,
        "best_technique": result.best_technique,
        "best_assignment": result.best_assignment,
        "final_score": result.final_score,
        "total_trials": result.total_trials,
        "traces": {tech: {"trials": trace_to_records(tr, include_timings),
                          "best": tr.best, "stop_reason": tr.stop_reason}
                   for tech, tr in result.traces.items()},
    }
    if result.predictions is not None:
        doc["predictions"] = result.predictions
    if result.failures:
        doc["failures"] = result.failures
    if include_timings:
        doc["wall_time"] = result.wall_time
    return doc


def comparison_to_dict(report: ComparisonReport, include_timings: bool = False) -> dict:
    doc = {
        "dataset": report.dataset,
        "metric": report.metric,
        "accuracy_delta": report.accuracy_delta,
        "trial_count_ratio": report.trial_count_ratio,
        "adaptive": result_to_dict(report.adaptive, include_timings),
        "conventional": result_to_dict(report.conventional, include_timings),
    }
    if include_timings:
        doc["wall_time_ratio"] = report.wall_time_ratio
    return doc


def split_corpus(corpus, split: float, seed: int):
    """Shuffled train/test split of a corpus (train fraction ``split``)."""
    corpus = list(corpus)
    if not 0.0 < split < 1.0:
        raise ValidationError(f"split must be in (0, 1), got {split}")
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "split")))
    perm = rng.permutation(len(corpus))
    n_train = int(round(len(corpus) * split))
    n_train = min(max(n_train, 1), len(corpus) - 1)
    train = [corpus[i] for i in perm[:n_train]]
    test = [corpus[i] for i in perm[n_train:]]
    return train, test


def benchmark(corpus, techniques, metric: str, budget: int = DEFAULT_BUDGET,
              seed: int = 0, split: float = 0.8,
              regression: str = "random-forest", ks=DEFAULT_KS,
              k_eval: int = DEFAULT_EVAL_K,
              workers: int | None = None,
              include_timings: bool = False) -> dict:
    """Train on a corpus split, then compare conventional vs adaptive
    (top-1 and top-3) on every held-out dataset."""
    corpus = list(corpus)
    train, test = split_corpus(corpus, split, seed)
    tech_ids = [get_technique(t).id for t in techniques]
    store = pretrain(train, tech_ids, metric, budget=budget, seed=seed,
                     regression=regression, ks=ks, k_eval=k_eval, workers=workers)
    top3 = min(3, len(tech_ids))
    results = []
    table = []
    for ds in test:
        conv = conventional_optimize(ds, tech_ids, metric, budget=budget,
                                     seed=seed, k_eval=k_eval, workers=workers)
        top1 = adaptive_optimize(ds, store, top_m=1, budget=budget, seed=seed,
                                 workers=workers)
        top3_res = adaptive_optimize(ds, store, top_m=top3, budget=budget,
                                     seed=seed, workers=workers)
        cmp1 = compare(top1, conv)
        cmp3 = compare(top3_res, conv)
        results.append({
            "dataset": ds.name,
            "conventional": result_to_dict(conv, include_timings),
            "adaptive_top1": result_to_dict(top1, include_timings),
            "adaptive_top3": result_to_dict(top3_res, include_timings),
            "compare_top1": {"accuracy_delta": cmp1.accuracy_delta,
                             "trial_count_ratio": cmp1.trial_count_ratio},
            "compare_top3": {"accuracy_delta": cmp3.accuracy_delta,
                             "trial_count_ratio": cmp3.trial_count_ratio},
        })
        table.append({
            "dataset": ds.name,
            "conventional_score": repr(conv.final_score),
            "top1_score": repr(top1.final_score),
            "top3_score": repr(top3_res.final_score),
            "conventional_trials": conv.total_trials,
            "top1_trials": top1.total_trials,
            "top3_trials": top3_res.total_trials,
            "delta_top1": repr(cmp1.accuracy_delta),
            "delta_top3": repr(cmp3.accuracy_delta),
        })
    deltas1 = [r["compare_top1"]["accuracy_delta"] for r in results]
    deltas3 = [r["compare_top3"]["accuracy_delta"] for r in results]
    ratios1 = [r["compare_top1"]["trial_count_ratio"] for r in results]
    ratios3 = [r["compare_top3"]["trial_count_ratio"] for r in results]
    return {
        "metric": metric,
        "budget": int(budget),
        "seed": int(seed),
        "techniques": tech_ids,
        "regression": regression,
        "train_datasets": [ds.name for ds in train],
        "test_datasets": [ds.name for ds in test],
        "results": results,
        "summary": {
            "mean_accuracy_delta_top1": float(np.mean(deltas1)),
            "mean_accuracy_delta_top3": float(np.mean(deltas3)),
            "mean_trial_count_ratio_top1": float(np.mean(ratios1)),
            "mean_trial_count_ratio_top3": float(np.mean(ratios3)),
        },
        "summary_table": table,
    }


# ---------------------------------------------------------------------------
# model store serialization (JSON, lossless for float64 via repr round-trip)

def store_to_json(store: ModelStore) -> str:
    doc = {
        "schema": STORE_SCHEMA,
        "metric": store.metric,
        "feature_ks": store.feature_ks,
        "manifest": store.manifest,
        "models": {tech: {m: model_to_record(model) for m, model in per.items()}
                   for tech, per in store.models.items()},
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def store_from_json(text: str) -> ModelStore:
    doc = json.loads(text)
    if doc.get("schema") != STORE_SCHEMA:
        raise ValidationError(f"unexpected model-store schema {doc.get('schema')!r}")
    models = {tech: {m: model_from_record(rec) for m, rec in per.items()}
              for tech, per in doc["models"].items()}
    return ModelStore(metric=doc["metric"], feature_ks=list(doc["feature_ks"]),
                      models=models, manifest=doc["manifest"])


def save_model_store(store: ModelStore, path) -> None:
    with open(path, "w") as fh:
        fh.write(store_to_json(store))


def load_model_store(path) -> ModelStore:
    with open(path) as fh:
        return store_from_json(fh.read())
