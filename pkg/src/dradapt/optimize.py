"""Hyperparameter search: random search and Bayesian optimization with a
pluggable early-stop criterion.

The Bayesian loop runs ``n_init`` random trials, then fits a Gaussian
process (Matern-5/2 kernel on unit-cube-normalized coordinates, observation
noise 1e-6, lengthscale picked from a small grid by marginal likelihood)
and maximizes expected improvement over 256 randomly sampled candidates.
Objectives are cached by assignment, so a duplicate proposal is served from
the cache instead of being re-evaluated. Objective failures score -inf and
stay in the trace for diagnostics.
"""

import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import ndtr

from .drtech import HyperparamSpace, validate_assignment
from .errors import ObjectiveError, ValidationError
from .seeding import derive_seed, generator

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 50
DEFAULT_N_INIT = 10
N_CANDIDATES = 256
GP_NOISE = 1e-6
EI_XI = 0.01
_LENGTHSCALES = (0.1, 0.25, 0.5, 1.0, 2.0)

STOP_BUDGET = "budget-exhausted"
STOP_THRESHOLD = "early-threshold"
STOP_OBJECTIVE_ERROR = "objective-error"


@dataclass(frozen=True)
class StopCriterion:
    kind: str = "none"  # "none" | "threshold"
    threshold: float | None = None

    def satisfied(self, score: float) -> bool:
        return self.kind == "threshold" and score >= self.threshold


NO_STOP = StopCriterion()


def make_threshold_stop(predicted_max: float) -> StopCriterion:
    """Stop once the best score reaches the predicted maximum, exactly."""
    if not np.isfinite(predicted_max):
        raise ValidationError("threshold must be finite")
    return StopCriterion(kind="threshold", threshold=float(predicted_max))


@dataclass
class Trial:
    assignment: dict
    score: float
    seed: int
    wall_time: float
    error: str | None = None


@dataclass
class OptimizationTrace:
    trials: list = field(default_factory=list)
    best: int = -1
    stop_reason: str = STOP_BUDGET

    @property
    def best_trial(self) -> Trial:
        return self.trials[self.best]

    @property
    def best_score(self) -> float:
        return self.trials[self.best].score

    def best_so_far(self) -> list:
        """Non-decreasing running maxima over the trial scores."""
        out, cur = [], -np.inf
        for t in self.trials:
            cur = max(cur, t.score)
            out.append(cur)
        return out

    @property
    def wall_time(self) -> float:
        return sum(t.wall_time for t in self.trials)


# ---------------------------------------------------------------------------
# sampling and normalization

def _sample_assignment(space: HyperparamSpace, rng) -> dict:
    out = {}
    for dim in space.dims:
        if dim.type == "integer":
            out[dim.name] = int(rng.integers(int(dim.lower), int(dim.upper) + 1))
        elif dim.type == "log-real":
            out[dim.name] = float(np.exp(rng.uniform(np.log(dim.lower),
                                                     np.log(dim.upper))))
        else:
            out[dim.name] = float(rng.uniform(dim.lower, dim.upper))
    return out


def _to_unit(space: HyperparamSpace, assignment: dict) -> np.ndarray:
    out = np.empty(len(space.dims))
    for i, dim in enumerate(space.dims):
        v = assignment[dim.name]
        if dim.type == "log-real":
            out[i] = (np.log(v) - np.log(dim.lower)) / (np.log(dim.upper) - np.log(dim.lower))
        else:
            out[i] = (v - dim.lower) / (dim.upper - dim.lower)
    return out


def _from_unit(space: HyperparamSpace, u: np.ndarray) -> dict:
    out = {}
    for i, dim in enumerate(space.dims):
        v = float(np.clip(u[i], 0.0, 1.0))
        if dim.type == "log-real":
            out[dim.name] = float(np.exp(np.log(dim.lower)
                                         + v * (np.log(dim.upper) - np.log(dim.lower))))
        elif dim.type == "integer":
            out[dim.name] = int(np.clip(round(dim.lower + v * (dim.upper - dim.lower)),
                                        dim.lower, dim.upper))
        else:
            out[dim.name] = float(dim.lower + v * (dim.upper - dim.lower))
    return out


def _key(space: HyperparamSpace, assignment: dict) -> tuple:
    return tuple(assignment[d.name] for d in space.dims)


# ---------------------------------------------------------------------------
# Gaussian process surrogate

def _matern52(a: np.ndarray, b: np.ndarray, ell: float) -> np.ndarray:
    d = np.sqrt(np.maximum(
        np.square(a[:, None, :] - b[None, :, :]).sum(-1), 0.0))
    s = np.sqrt(5.0) * d / ell
    return (1.0 + s + s * s / 3.0) * np.exp(-s)


class _GP:
    def __init__(self, X: np.ndarray, y: np.ndarray):
        self.X = X
        self.y_mean = float(y.mean())
        self.y_std = float(y.std())
        if self.y_std == 0.0:
            self.y_std = 1.0
        self.y = (y - self.y_mean) / self.y_std
        best_ll, best = -np.inf, None
        n = len(y)
        for ell in _LENGTHSCALES:
            k = _matern52(X, X, ell) + GP_NOISE * np.eye(n)
            try:
                factor = cho_factor(k, lower=True)
            except np.linalg.LinAlgError:
                continue
            alpha = cho_solve(factor, self.y)
            ll = (-0.5 * float(self.y @ alpha)
                  - float(np.log(np.diag(factor[0])).sum())
                  - 0.5 * n * np.log(2.0 * np.pi))
            if np.isfinite(ll) and ll > best_ll:
                best_ll, best = ll, (ell, factor, alpha)
        if best is None:
            raise np.linalg.LinAlgError("no stable lengthscale")
        self.ell, self._factor, self._alpha = best

    def predict(self, Xq: np.ndarray):
        kq = _matern52(Xq, self.X, self.ell)
        mu = kq @ self._alpha
        v = cho_solve(self._factor, kq.T)
        var = np.maximum(1.0 + GP_NOISE - np.einsum("ij,ji->i", kq, v), 1e-12)
        return mu, np.sqrt(var)

    def expected_improvement(self, Xq: np.ndarray) -> np.ndarray:
        mu, sigma = self.predict(Xq)
        best = float(self.y.max())
        gamma = (mu - best - EI_XI) / sigma
        phi = np.exp(-0.5 * gamma * gamma) / np.sqrt(2.0 * np.pi)
        return (mu - best - EI_XI) * ndtr(gamma) + sigma * phi


# ---------------------------------------------------------------------------
# search loops

def _run_trial(objective, space, assignment, trial_seed, cache):
    key = _key(space, assignment)
    if key in cache:
        cached = cache[key]
        return Trial(assignment=dict(assignment), score=cached.score,
                     seed=cached.seed, wall_time=0.0, error=cached.error)
    t0 = time.perf_counter()
    try:
        score = float(objective(validate_assignment(space, assignment), trial_seed))
        error = None
    except Exception as exc:  # objective failures are data, not crashes
        score = -np.inf
        error = f"{type(exc).__name__}: {exc}"
    trial = Trial(assignment=dict(assignment), score=score, seed=trial_seed,
                  wall_time=time.perf_counter() - t0, error=error)
    cache[key] = trial
    return trial


def _finalize(trace: OptimizationTrace) -> OptimizationTrace:
    scores = [t.score for t in trace.trials]
    if not scores or not np.isfinite(max(scores)):
        trace.stop_reason = STOP_OBJECTIVE_ERROR
        raise ObjectiveError("every trial failed", trace=trace)
    trace.best = int(np.argmax(scores))
    return trace


def random_search(objective, space: HyperparamSpace, budget: int, seed: int,
                  stop: StopCriterion = NO_STOP) -> OptimizationTrace:
    """Uniform sampling over the space (log-uniform on log-real dims).

    An empty space yields a single trial regardless of budget.
    """
    if budget < 1:
        raise ValidationError("budget must be >= 1")
    rng = generator(seed, "random-search")
    trace = OptimizationTrace()
    cache: dict = {}
    n_trials = 1 if len(space) == 0 else budget
    for t in range(n_trials):
        assignment = _sample_assignment(space, rng)
        trial = _run_trial(objective, space, assignment,
                           derive_seed(seed, "trial", t), cache)
        trace.trials.append(trial)
        if stop.satisfied(trial.score):
            trace.stop_reason = STOP_THRESHOLD
            break
    return _finalize(trace)


def bayes_optimize(objective, space: HyperparamSpace, budget: int = DEFAULT_BUDGET,
                   seed: int = 0, stop: StopCriterion = NO_STOP,
                   n_init: int = DEFAULT_N_INIT) -> OptimizationTrace:
    """Gaussian-process search maximizing expected improvement.

    The stop criterion is checked after every evaluation, including the
    initial random ones. An empty space yields a single trial.
    """
    if budget < 1:
        raise ValidationError("budget must be >= 1")
    if len(space) > 0 and budget < n_init:
        raise ValidationError(f"budget {budget} must be >= n_init {n_init}")
    rng = generator(seed, "bayes")
    trace = OptimizationTrace()
    cache: dict = {}

    def run(assignment, t):
        trial = _run_trial(objective, space, assignment,
                           derive_seed(seed, "trial", t), cache)
        trace.trials.append(trial)
        return stop.satisfied(trial.score)

    if len(space) == 0:
        if run({}, 0):
            trace.stop_reason = STOP_THRESHOLD
        return _finalize(trace)

    for t in range(min(n_init, budget)):
        if run(_sample_assignment(space, rng), t):
            trace.stop_reason = STOP_THRESHOLD
            return _finalize(trace)

    for t in range(len(trace.trials), budget):
        assignment = _propose(space, trace, rng)
        if run(assignment, t):
            trace.stop_reason = STOP_THRESHOLD
            break
    return _finalize(trace)


def _propose(space: HyperparamSpace, trace: OptimizationTrace, rng) -> dict:
    finite = [tr for tr in trace.trials if np.isfinite(tr.score)]
    cand_u = rng.uniform(size=(N_CANDIDATES, len(space.dims)))
    candidates = [_from_unit(space, u) for u in cand_u]
    if len(finite) < 2:
        return candidates[0]
    seen = {_key(space, tr.assignment) for tr in trace.trials}
    novel = [c for c in candidates if _key(space, c) not in seen]
    pool = novel if novel else candidates  # fully-explored spaces reuse the cache
    try:
        X = np.vstack([_to_unit(space, tr.assignment) for tr in finite])
        y = np.array([tr.score for tr in finite])
        gp = _GP(X, y)
        ei = gp.expected_improvement(np.vstack([_to_unit(space, c) for c in pool]))
        if not np.isfinite(ei).all():
            raise np.linalg.LinAlgError("non-finite acquisition")
        return pool[int(np.argmax(ei))]
    except np.linalg.LinAlgError as exc:
        log.warning("GP step failed (%s); falling back to a random proposal", exc)
        return pool[0]


# ---------------------------------------------------------------------------
# trace serialization: JSON lines, one trial per line, then a footer

def trace_to_records(trace: OptimizationTrace, include_timings: bool = False) -> list:
    """Trial dicts suitable for JSON; -inf scores become null."""
    out = []
    for t in trace.trials:
        rec = {"assignment": t.assignment,
               "score": t.score if np.isfinite(t.score) else None,
               "seed": t.seed}
        if include_timings:
            rec["wall_time"] = t.wall_time
        if t.error is not None:
            rec["error"] = t.error
        out.append(rec)
    return out


def trace_to_jsonl(trace: OptimizationTrace, include_timings: bool = False) -> str:
    lines = [json.dumps(rec, sort_keys=True)
             for rec in trace_to_records(trace, include_timings)]
    lines.append(json.dumps({"best": trace.best, "stop_reason": trace.stop_reason},
                            sort_keys=True))
    return "\n".join(lines) + "\n"


def trace_from_jsonl(text: str) -> OptimizationTrace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty trace")
    footer = json.loads(lines[-1])
    trials = []
    for ln in lines[:-1]:
        rec = json.loads(ln)
        score = rec["score"]
        trials.append(Trial(assignment=rec["assignment"],
                            score=-np.inf if score is None else float(score),
                            seed=int(rec["seed"]),
                            wall_time=float(rec.get("wall_time", 0.0)),
                            error=rec.get("error")))
    return OptimizationTrace(trials=trials, best=int(footer["best"]),
                             stop_reason=footer["stop_reason"])
