"""``dradapt`` command-line interface.

Subcommands: complexity, evaluate, project, optimize, pretrain, predict,
adaptive-run, conventional-run, benchmark. stdout carries only the
requested machine-readable payload (JSON by default, ``--csv`` for flat
tables); diagnostics go to stderr. Exit codes: 0 success, 1 validation
error, 2 runtime error.

Every randomized behavior is keyed to ``--seed``; identical invocations
reproduce identical stdout bytes. Measured wall times are therefore kept
out of the payload unless ``--timings`` is passed. A JSON config file
(``--config``) mirrors every flag by its long name with underscores; flags
override file values.
"""

import argparse
import io
import json
import logging
import sys

from . import __version__
from . import workflow as _workflow
from .complexity import DEFAULT_KS, clamped_ks, complexity_features
from .data import (load_dataset, load_manifest, standardize, subsample,
                   synthetic_corpus, write_points)
from .drtech import default_assignment, get_technique, list_techniques, project
from .errors import (DegenerateInputError, DradaptError, ParseError,
                     ValidationError)
from .optimize import (DEFAULT_BUDGET, NO_STOP, bayes_optimize,
                       make_threshold_stop, random_search, trace_to_jsonl)
from .quality import DEFAULT_EVAL_K, metric_ids, score_projection
from .seeding import derive_seed
from .workflow import (adaptive_optimize, conventional_optimize,
                       load_model_store, predict_max_accuracy, pretrain,
                       save_model_store)

SCHEMA = "dradapt/1"
log = logging.getLogger("dradapt")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit(payload: str) -> None:
    sys.stdout.write(payload)
    if not payload.endswith("\n"):
        sys.stdout.write("\n")


def _emit_json(doc) -> None:
    _emit(json.dumps(doc, sort_keys=True, indent=2))


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    return doc


def _resolve(args, config, name, default):
    v = getattr(args, name, None)
    if v is not None:
        return v
    if name in config:
        return config[name]
    return default


def _dataset_args(p):
    p.add_argument("dataset", help="CSV file of points, one row per point")
    p.add_argument("--delimiter", default=None)
    p.add_argument("--header", action="store_true", default=None,
                   help="first row is a header")
    p.add_argument("--label-column", dest="label_column", default=None,
                   help="name, index, or 'last'")
    p.add_argument("--standardize", action="store_true", default=None,
                   help="z-score each column before any computation")
    p.add_argument("--max-n", dest="max_n", type=int, default=None,
                   help="subsample to at most this many points")


def _common_args(p):
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None, help="JSON file mirroring flags")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--timings", action="store_true", default=None,
                   help="include measured wall times in the payload "
                        "(breaks byte-identical reruns)")


def _load_cli_dataset(args, config):
    delim = _resolve(args, config, "delimiter", ",")
    header = bool(_resolve(args, config, "header", False))
    label = _resolve(args, config, "label_column", None)
    ds = load_dataset(args.dataset, delimiter=delim, has_header=header,
                      label_column=label)
    if bool(_resolve(args, config, "standardize", False)):
        ds = standardize(ds)
    max_n = _resolve(args, config, "max_n", None)
    if max_n is not None:
        ds = subsample(ds, int(max_n), _resolve(args, config, "seed", 0))
    return ds


def _parse_ks(text) -> list:
    if isinstance(text, (list, tuple)):
        return [int(k) for k in text]
    try:
        return [int(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"bad k list {text!r}; expected e.g. 25,50,75")


def _parse_techniques(text):
    if text is None:
        return [t.id for t in list_techniques()]
    if isinstance(text, (list, tuple)):
        return list(text)
    return [tok.strip() for tok in str(text).split(",") if tok.strip()]


def _load_corpus(args, config, seed):
    corpus_path = _resolve(args, config, "corpus", None)
    synthetic = _resolve(args, config, "synthetic", None)
    if corpus_path and synthetic:
        raise ValidationError("give either --corpus or --synthetic, not both")
    if corpus_path:
        return load_manifest(corpus_path)
    if synthetic:
        return synthetic_corpus(int(synthetic), derive_seed(seed, "corpus"))
    raise ValidationError("a corpus is required: --corpus manifest.json or --synthetic N")


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_complexity(args):
    config = _load_config(args.config)
    ds = _load_cli_dataset(args, config)
    ks = _parse_ks(_resolve(args, config, "k", list(DEFAULT_KS)))
    effective = clamped_ks(ks, ds.n)
    if effective != ks:
        log.warning("k values %s clamped to %s for N=%d", ks, effective, ds.n)
    fv = complexity_features(ds, effective)
    if bool(_resolve(args, config, "csv", False)):
        buf = io.StringIO()
        buf.write("metric,k,value\n")
        for metric, k, value in fv.entries:
            buf.write(f"{metric},{'' if k is None else k},{value!r}\n")
        _emit(buf.getvalue())
    else:
        _emit_json({
            "schema": SCHEMA, "kind": "complexity", "dataset": ds.name,
            "n": ds.n, "dim": ds.dim,
            "features": [{"metric": m, "k": k, "value": v} for m, k, v in fv.entries],
        })
    return 0


def _cmd_evaluate(args):
    config = _load_config(args.config)
    delim = _resolve(args, config, "delimiter", ",")
    hi = load_dataset(args.hi, delimiter=delim)
    lo = load_dataset(args.lo, delimiter=delim)
    k = int(_resolve(args, config, "k", DEFAULT_EVAL_K))
    value = score_projection(args.metric, hi, lo, k)
    _emit_json({"schema": SCHEMA, "kind": "evaluate", "metric": args.metric,
                "value": value, "k": k})
    return 0


def _cmd_project(args):
    config = _load_config(args.config)
    ds = _load_cli_dataset(args, config)
    seed = int(_resolve(args, config, "seed", 0))
    desc = get_technique(args.technique)
    hyper = _resolve(args, config, "hyper", None)
    if hyper is None:
        assignment = default_assignment(desc, ds.n)
    elif isinstance(hyper, dict):
        assignment = hyper
    else:
        assignment = json.loads(hyper)
    proj = project(desc, ds, assignment, seed)
    out = _resolve(args, config, "output", None)
    if out:
        write_points(proj.points, out)
        _emit_json({"schema": SCHEMA, "kind": "project", "technique": desc.id,
                    "n": ds.n, "output": out, "hyperparameters": assignment})
    else:
        buf = io.StringIO()
        for row in proj.points:
            buf.write(f"{float(row[0])!r},{float(row[1])!r}\n")
        _emit(buf.getvalue())
    return 0


def _cmd_optimize(args):
    config = _load_config(args.config)
    ds = _load_cli_dataset(args, config)
    seed = int(_resolve(args, config, "seed", 0))
    budget = int(_resolve(args, config, "budget", DEFAULT_BUDGET))
    metric = _resolve(args, config, "metric", "tnc")
    k_eval = int(_resolve(args, config, "k", DEFAULT_EVAL_K))
    method = _resolve(args, config, "method", "bayes")
    threshold = _resolve(args, config, "threshold", None)
    stop = make_threshold_stop(float(threshold)) if threshold is not None else NO_STOP
    desc = get_technique(args.technique)
    objective = _workflow.make_objective(ds, desc, metric, k_eval)
    space = desc.space_for(ds.n)
    if method == "random":
        trace = random_search(objective, space, budget, seed, stop)
    elif method == "bayes":
        trace = bayes_optimize(objective, space, budget=budget, seed=seed, stop=stop)
    else:
        raise ValidationError(f"unknown method {method!r}; use bayes or random")
    _emit(trace_to_jsonl(trace, include_timings=bool(args.timings)))
    return 0


def _cmd_pretrain(args):
    config = _load_config(args.config)
    seed = int(_resolve(args, config, "seed", 0))
    budget = int(_resolve(args, config, "budget", DEFAULT_BUDGET))
    metric = _resolve(args, config, "metric", "tnc")
    techniques = _parse_techniques(_resolve(args, config, "techniques", None))
    ks = _parse_ks(_resolve(args, config, "k", list(DEFAULT_KS)))
    regression = _resolve(args, config, "regression", "random-forest")
    corpus = _load_corpus(args, config, seed)
    store = pretrain(corpus, techniques, metric, budget=budget, seed=seed,
                     regression=regression, ks=ks,
                     k_eval=int(_resolve(args, config, "k_eval", DEFAULT_EVAL_K)),
                     workers=_resolve(args, config, "workers", None))
    out = _resolve(args, config, "output", None)
    if out:
        save_model_store(store, out)
    _emit_json({"schema": SCHEMA, "kind": "pretrain", "metric": metric,
                "techniques": store.technique_ids,
                "datasets": store.manifest["dataset_names"],
                "corpus_hash": store.manifest["corpus_hash"],
                "regression": regression, "budget": budget, "seed": seed,
                "output": out})
    return 0


def _cmd_predict(args):
    config = _load_config(args.config)
    store = load_model_store(args.store)
    ds = _load_cli_dataset(args, config)
    fv = complexity_features(ds, store.feature_ks)
    preds = predict_max_accuracy(store, fv)
    _emit_json({"schema": SCHEMA, "kind": "predict", "dataset": ds.name,
                "metric": store.metric, "predictions": preds})
    return 0


def _cmd_adaptive_run(args):
    config = _load_config(args.config)
    ds = _load_cli_dataset(args, config)
    store = load_model_store(args.store)
    result = adaptive_optimize(
        ds, store,
        top_m=int(_resolve(args, config, "top_m", 1)),
        budget=int(_resolve(args, config, "budget", DEFAULT_BUDGET)),
        seed=int(_resolve(args, config, "seed", 0)),
        threshold_fraction=float(_resolve(args, config, "threshold_fraction", 1.0)),
        workers=_resolve(args, config, "workers", None))
    out = _resolve(args, config, "output_projection", None)
    if out:
        write_points(result.projection, out)
    _emit_json({"schema": SCHEMA, "kind": "adaptive-run",
                **_workflow.result_to_dict(result, include_timings=bool(args.timings))})
    return 0


def _cmd_conventional_run(args):
    config = _load_config(args.config)
    ds = _load_cli_dataset(args, config)
    result = conventional_optimize(
        ds, _parse_techniques(_resolve(args, config, "techniques", None)),
        _resolve(args, config, "metric", "tnc"),
        budget=int(_resolve(args, config, "budget", DEFAULT_BUDGET)),
        seed=int(_resolve(args, config, "seed", 0)),
        k_eval=int(_resolve(args, config, "k", DEFAULT_EVAL_K)),
        workers=_resolve(args, config, "workers", None))
    out = _resolve(args, config, "output_projection", None)
    if out:
        write_points(result.projection, out)
    _emit_json({"schema": SCHEMA, "kind": "conventional-run",
                **_workflow.result_to_dict(result, include_timings=bool(args.timings))})
    return 0


def _cmd_benchmark(args):
    import csv as _csv
    import os

    config = _load_config(args.config)
    seed = int(_resolve(args, config, "seed", 0))
    budget = int(_resolve(args, config, "budget", DEFAULT_BUDGET))
    metric = _resolve(args, config, "metric", "tnc")
    techniques = _parse_techniques(_resolve(args, config, "techniques", None))
    split = float(_resolve(args, config, "split", 0.8))
    corpus = _load_corpus(args, config, seed)
    report = _workflow.benchmark(
        corpus, techniques, metric, budget=budget, seed=seed, split=split,
        regression=_resolve(args, config, "regression", "random-forest"),
        ks=_parse_ks(_resolve(args, config, "k", list(DEFAULT_KS))),
        k_eval=int(_resolve(args, config, "k_eval", DEFAULT_EVAL_K)),
        workers=_resolve(args, config, "workers", None),
        include_timings=bool(args.timings))
    out_dir = _resolve(args, config, "output_dir", None)
    payload = json.dumps({"schema": SCHEMA, "kind": "benchmark", **report},
                         sort_keys=True, indent=2) + "\n"
    rows = report["summary_table"]
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            fh.write(payload)
        with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
            writer = _csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    if bool(_resolve(args, config, "csv", False)):
        buf = io.StringIO()
        writer = _csv.DictWriter(buf, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
        _emit(buf.getvalue())
    else:
        _emit(payload)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="dradapt", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("complexity", help="structural complexity feature vector")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--k", default=None, help="comma-separated MNC k values")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=None)
    fmt.add_argument("--csv", action="store_true", default=None)
    p.set_defaults(fn=_cmd_complexity)

    p = sub.add_parser("evaluate", help="projection quality score")
    p.add_argument("--hi", required=True, help="original data CSV")
    p.add_argument("--lo", required=True, help="projection CSV")
    p.add_argument("--metric", required=True, choices=metric_ids())
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--delimiter", default=None)
    _common_args(p)
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("project", help="run one DR technique")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--technique", required=True)
    p.add_argument("--hyper", default=None, help="hyperparameter JSON object")
    p.add_argument("--output", default=None, help="write the N x 2 CSV here")
    p.set_defaults(fn=_cmd_project)

    p = sub.add_parser("optimize", help="hyperparameter search for one technique")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--technique", required=True)
    p.add_argument("--metric", default=None, choices=metric_ids())
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--method", default=None, choices=["bayes", "random"])
    p.add_argument("--threshold", type=float, default=None,
                   help="early-stop once the best score reaches this")
    p.add_argument("--k", type=int, default=None, help="evaluation neighborhood size")
    p.set_defaults(fn=_cmd_optimize)

    p = sub.add_parser("pretrain", help="train per-technique accuracy predictors")
    _common_args(p)
    p.add_argument("--corpus", default=None, help="dataset manifest JSON")
    p.add_argument("--synthetic", type=int, default=None,
                   help="use a generated corpus of this many datasets")
    p.add_argument("--metric", default=None, choices=metric_ids())
    p.add_argument("--techniques", default=None, help="comma-separated ids")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--k", default=None, help="comma-separated MNC k values")
    p.add_argument("--k-eval", dest="k_eval", type=int, default=None)
    p.add_argument("--regression", default=None,
                   choices=["linear", "polynomial2", "knn", "random-forest"])
    p.add_argument("--output", default=None, help="model store JSON path")
    p.set_defaults(fn=_cmd_pretrain)

    p = sub.add_parser("predict", help="predicted max accuracy per technique")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--store", required=True, help="model store JSON")
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("adaptive-run", help="dataset-adaptive optimization")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--store", required=True, help="model store JSON")
    p.add_argument("--top-m", dest="top_m", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--threshold-fraction", dest="threshold_fraction",
                   type=float, default=None)
    p.add_argument("--output-projection", dest="output_projection", default=None)
    p.set_defaults(fn=_cmd_adaptive_run)

    p = sub.add_parser("conventional-run", help="full-budget baseline")
    _dataset_args(p)
    _common_args(p)
    p.add_argument("--metric", default=None, choices=metric_ids())
    p.add_argument("--techniques", default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--output-projection", dest="output_projection", default=None)
    p.set_defaults(fn=_cmd_conventional_run)

    p = sub.add_parser("benchmark", help="adaptive vs conventional comparison")
    _common_args(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--synthetic", type=int, default=None)
    p.add_argument("--metric", default=None, choices=metric_ids())
    p.add_argument("--techniques", default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--split", type=float, default=None,
                   help="training fraction of the corpus (default 0.8)")
    p.add_argument("--k", default=None, help="comma-separated MNC k values")
    p.add_argument("--k-eval", dest="k_eval", type=int, default=None)
    p.add_argument("--regression", default=None)
    p.add_argument("--output-dir", dest="output_dir", default=None)
    p.add_argument("--csv", action="store_true", default=None,
                   help="emit the flat summary table instead of JSON")
    p.set_defaults(fn=_cmd_benchmark)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "fn", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.fn(args)
    except (ValidationError, ParseError, DegenerateInputError) as exc:
        print(f"dradapt: {exc}", file=sys.stderr)
        return 1
    except (DradaptError, OSError, json.JSONDecodeError) as exc:
        print(f"dradapt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:  # console_scripts target
    sys.exit(main())
