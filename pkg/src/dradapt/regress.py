"""Regression models mapping complexity feature vectors to maximum
achievable accuracy, with five-fold cross-validated R^2 reporting.

Four model kinds are supported, all deterministic given a seed and all
serializable to plain JSON records (the model store is a JSON file):

* ``linear`` — least squares on z-scored features, ridge fallback if the
  solution is not finite;
* ``polynomial2`` — degree-2 expansion (squares and pairwise interactions)
  with a small ridge term for conditioning;
* ``knn`` — k=5 distance-weighted neighbors on z-scored features; a query
  equal to a training point returns the exact-hit target average;
* ``random-forest`` — 100 trees on bootstrap samples; at every node the
  best variance-reducing (feature, midpoint threshold) split is chosen
  among ceil(d/3) randomly drawn features; leaves predict the mean.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .seeding import generator

MODEL_KINDS = ("linear", "polynomial2", "knn", "random-forest")
RIDGE_LAMBDA = 1e-8
KNN_K = 5
FOREST_TREES = 100


@dataclass(frozen=True)
class RegressionModel:
    kind: str
    feature_arity: int
    params: dict


@dataclass(frozen=True)
class CvReport:
    kind: str
    mean_r2: float
    fold_r2: list
    seed: int


def _as_matrix(X) -> np.ndarray:
    rows = []
    for x in X:
        rows.append(np.asarray(getattr(x, "values", x), dtype=np.float64))
    if not rows:
        raise ValidationError("no feature vectors given")
    arity = rows[0].shape[0]
    if any(r.shape != (arity,) for r in rows):
        raise ValidationError("inconsistent feature arity")
    return np.vstack(rows)


def _standardize_fit(X):
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return (X - mu) / sd, mu, sd


def _poly2(X):
    n, d = X.shape
    cols = [X]
    for i in range(d):
        for j in range(i, d):
            cols.append((X[:, i] * X[:, j])[:, None])
    return np.hstack(cols)


def _solve_least_squares(A, y, ridge_always=False):
    if not ridge_always:
        beta, *_ = np.linalg.lstsq(A, y, rcond=None)
        if np.isfinite(beta).all():
            return beta
    ata = A.T @ A + RIDGE_LAMBDA * np.eye(A.shape[1])
    return np.linalg.solve(ata, A.T @ y)


# ---------------------------------------------------------------------------
# random forest

def _best_split(X, y, feat_ids):
    best = None  # (sse, feature, threshold)
    base_n = len(y)
    for f in feat_ids:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ys = y[order]
        distinct = np.nonzero(np.diff(xs) > 0)[0]
        if distinct.size == 0:
            continue
        csum = np.cumsum(ys)
        csum2 = np.cumsum(ys * ys)
        total, total2 = csum[-1], csum2[-1]
        nl = distinct + 1
        nr = base_n - nl
        sl, sl2 = csum[distinct], csum2[distinct]
        sse = (sl2 - sl * sl / nl) + ((total2 - sl2) - (total - sl) ** 2 / nr)
        best_i = int(np.argmin(sse))
        cand = (float(sse[best_i]), int(f),
                float(0.5 * (xs[distinct[best_i]] + xs[distinct[best_i] + 1])))
        if best is None or cand[0] < best[0]:
            best = cand
    return best


def _grow_tree(X, y, rng, mtry):
    # nodes as parallel lists; leaves have feature -1 and value = mean target
    feature, threshold, left, right, value = [], [], [], [], []

    def build(idx):
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[idx].mean()))
        if idx.size < 2 or np.all(y[idx] == y[idx][0]):
            return node
        feats = rng.choice(X.shape[1], size=mtry, replace=False)
        split = _best_split(X[idx], y[idx], np.sort(feats))
        if split is None:
            return node
        _, f, thr = split
        mask = X[idx, f] <= thr
        if not mask.any() or mask.all():
            return node
        feature[node] = f
        threshold[node] = thr
        left[node] = build(idx[mask])
        right[node] = build(idx[~mask])
        return node

    build(np.arange(len(y)))
    return {"feature": feature, "threshold": threshold,
            "left": left, "right": right, "value": value}


def _tree_predict(tree, x):
    node = 0
    feature = tree["feature"]
    while feature[node] >= 0:
        if x[feature[node]] <= tree["threshold"][node]:
            node = tree["left"][node]
        else:
            node = tree["right"][node]
    return tree["value"][node]


# ---------------------------------------------------------------------------
# public API

def fit(kind: str, X, y, seed: int = 0) -> RegressionModel:
    """Train a regression model; deterministic given the seed."""
    if kind not in MODEL_KINDS:
        raise ValidationError(f"unknown model kind {kind!r}; known: {MODEL_KINDS}")
    Xm = _as_matrix(X)
    yv = np.asarray(y, dtype=np.float64)
    if yv.shape != (Xm.shape[0],):
        raise ValidationError(
            f"y length {yv.shape} does not match {Xm.shape[0]} feature vectors")
    if Xm.shape[0] < 5:
        raise ValidationError(f"need at least 5 training rows, got {Xm.shape[0]}")
    arity = Xm.shape[1]

    if kind in ("linear", "polynomial2"):
        Xs, mu, sd = _standardize_fit(Xm)
        design = Xs if kind == "linear" else _poly2(Xs)
        A = np.hstack([np.ones((len(design), 1)), design])
        beta = _solve_least_squares(A, yv, ridge_always=(kind == "polynomial2"))
        params = {"mean": mu.tolist(), "scale": sd.tolist(),
                  "intercept": float(beta[0]), "coef": beta[1:].tolist()}
    elif kind == "knn":
        Xs, mu, sd = _standardize_fit(Xm)
        params = {"mean": mu.tolist(), "scale": sd.tolist(), "k": KNN_K,
                  "train_x": Xs.tolist(), "train_y": yv.tolist()}
    else:  # random-forest
        rng = generator(seed, "forest")
        mtry = max(1, int(round(arity / 3)))
        trees = []
        for _ in range(FOREST_TREES):
            boot = rng.integers(0, len(yv), size=len(yv))
            trees.append(_grow_tree(Xm[boot], yv[boot], rng, mtry))
        params = {"trees": trees, "mtry": mtry}
    return RegressionModel(kind=kind, feature_arity=arity, params=params)


def predict(model: RegressionModel, x) -> float:
    """Predict a single target value from one feature vector."""
    xv = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if xv.shape != (model.feature_arity,):
        raise ValidationError(
            f"expected arity {model.feature_arity}, got shape {xv.shape}")
    p = model.params
    if model.kind in ("linear", "polynomial2"):
        xs = (xv - np.asarray(p["mean"])) / np.asarray(p["scale"])
        row = xs if model.kind == "linear" else _poly2(xs[None, :])[0]
        return float(p["intercept"] + row @ np.asarray(p["coef"]))
    if model.kind == "knn":
        xs = (xv - np.asarray(p["mean"])) / np.asarray(p["scale"])
        tx = np.asarray(p["train_x"])
        ty = np.asarray(p["train_y"])
        d = np.linalg.norm(tx - xs, axis=1)
        hits = d == 0.0
        if hits.any():
            return float(ty[hits].mean())
        k = min(p["k"], len(ty))
        idx = np.lexsort((np.arange(len(d)), d))[:k]
        w = 1.0 / d[idx]
        return float((w * ty[idx]).sum() / w.sum())
    return float(np.mean([_tree_predict(t, xv) for t in p["trees"]]))


def predict_many(model: RegressionModel, X) -> np.ndarray:
    return np.array([predict(model, x) for x in X], dtype=np.float64)


def r2_score(y_true, y_pred) -> float:
    """1 - SS_res/SS_tot; defined as 0 when the target has zero variance."""
    yt = np.asarray(y_true, dtype=np.float64)
    yp = np.asarray(y_pred, dtype=np.float64)
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        return 0.0
    return 1.0 - float(np.sum((yt - yp) ** 2)) / ss_tot


def cross_validate(kind: str, X, y, folds: int = 5, seed: int = 0) -> CvReport:
    """Shuffled k-fold cross-validation; per-fold R^2 on the held-out fold."""
    Xm = _as_matrix(X)
    yv = np.asarray(y, dtype=np.float64)
    if folds < 2:
        raise ValidationError("folds must be >= 2")
    if Xm.shape[0] < folds:
        raise ValidationError(f"need at least {folds} rows, got {Xm.shape[0]}")
    rng = generator(seed, "cv")
    perm = rng.permutation(Xm.shape[0])
    parts = np.array_split(perm, folds)
    fold_r2 = []
    for i in range(folds):
        test = parts[i]
        train = np.concatenate([parts[j] for j in range(folds) if j != i])
        model = fit(kind, Xm[train], yv[train], seed=seed)
        fold_r2.append(r2_score(yv[test], predict_many(model, Xm[test])))
    return CvReport(kind=kind, mean_r2=float(np.mean(fold_r2)),
                    fold_r2=[float(v) for v in fold_r2], seed=seed)


def model_to_record(model: RegressionModel) -> dict:
    return {"kind": model.kind, "feature_arity": model.feature_arity,
            "params": model.params}


def model_from_record(record: dict) -> RegressionModel:
    if record.get("kind") not in MODEL_KINDS:
        raise ValidationError(f"unknown model kind in record: {record.get('kind')!r}")
    return RegressionModel(kind=record["kind"],
                           feature_arity=int(record["feature_arity"]),
                           params=record["params"])
