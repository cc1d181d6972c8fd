"""Feature-based closure prediction with L2-regularized logistic regression."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit, log_expit

from ..dataset import SimplexDataset, temporal_split
from ..projection import build_incidence, build_projected_graph
from ..triangles import triangle_weights
from .candidates import closure_labels, open_triangles
from .scores import neighborhood_counts

_RAW = ("w_ij", "w_ik", "w_jk", "deg_i", "deg_j", "deg_k", "simp_i", "simp_j", "simp_k",
        "cn_ij", "cn_ik", "cn_jk", "cn_ijk")
FEATURE_NAMES = _RAW + tuple(f"log_{f}" for f in _RAW)
N_FEATURES = len(FEATURE_NAMES)


class ConvergenceError(RuntimeError):
    pass


def extract_features(ds: SimplexDataset, triples: np.ndarray) -> np.ndarray:
    """The 26 features of each triple in ``ds``.

    Columns 0-12 are raw: pair co-membership counts, projected degrees,
    simplicial degrees, pairwise common neighbors and the triple common
    neighbor count.  Columns 13-25 are ``log`` of the first nine and
    ``log(1 + x)`` of the common-neighbor counts (natural logs).
    """
    triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    g = build_projected_graph(ds)
    inc = build_incidence(ds)
    cn3, pair, _ = neighborhood_counts(g, triples)
    raw = np.column_stack([
        triangle_weights(g, triples), g.d[triples], inc.degrees[triples], pair, cn3,
    ]).astype(np.float64)
    if np.any(raw[:, :9] <= 0):
        raise ValueError("features are defined for open triangles only")
    return np.column_stack([raw, np.log(raw[:, :9]), np.log1p(raw[:, 9:])])


# ----------------------------------------------------------------------
# model


def logistic_loss(params: np.ndarray, x: np.ndarray, y: np.ndarray, c: float):
    """Penalized negative log-likelihood and its gradient.

    ``params = [w, b]``; loss ``sum(log(1 + e^z) - y z) + ||w||^2 / (2C)`` with
    ``z = x w + b``; the intercept is not penalized.
    """
    w, b = params[:-1], params[-1]
    z = x @ w + b
    loss = float(-(y * log_expit(z) + (1 - y) * log_expit(-z)).sum() + w @ w / (2 * c))
    r = expit(z) - y
    grad = np.append(x.T @ r + w / c, r.sum())
    return loss, grad


def _hessian(params, x, c):
    z = x @ params[:-1] + params[-1]
    s = expit(z) * expit(-z)
    xa = np.column_stack([x, np.ones(len(x))])
    h = xa.T @ (xa * s[:, None])
    h[:-1, :-1] += np.eye(x.shape[1]) / c
    return h


def newton_minimize(fun, hess, x0: np.ndarray, gtol: float = 1e-6, max_iter: int = 200):
    """Damped Newton with Armijo backtracking; stops when ``||grad|| <= gtol``."""
    x = x0.copy()
    f, g = fun(x)
    for it in range(max_iter):
        if np.linalg.norm(g) <= gtol:
            return x, it
        h = hess(x)
        step = np.linalg.lstsq(h, -g, rcond=None)[0]
        if g @ step >= 0:  # not a descent direction; fall back to the gradient
            step = -g
        t = 1.0
        while True:
            xn = x + t * step
            fn, gn = fun(xn)
            if fn <= f + 1e-4 * t * (g @ step) or t < 1e-12:
                break
            t *= 0.5
        if t < 1e-12 and fn > f:
            break
        x, f, g = xn, fn, gn
    if np.linalg.norm(g) <= gtol:
        return x, max_iter
    raise ConvergenceError(f"gradient norm {np.linalg.norm(g):.3e} above {gtol:g}")


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    intercept: float
    C: float
    mean: np.ndarray
    scale: np.ndarray
    n_iter: int = 0
    windows: dict | None = None

    def decision(self, x: np.ndarray) -> np.ndarray:
        return ((x - self.mean) / self.scale) @ self.weights + self.intercept

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return expit(self.decision(x))


def fit_logistic(x: np.ndarray, y: np.ndarray, C: float = 1.0, gtol: float = 1e-6) -> LogisticModel:
    """Fit on standardized features; constant columns are left at zero."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(np.unique(y)) < 2:
        raise ValueError("training labels contain a single class")
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale == 0] = 1.0
    xs = (x - mean) / scale
    p0 = np.zeros(x.shape[1] + 1)
    p0[-1] = np.log(y.mean() / (1 - y.mean()))
    params, it = newton_minimize(lambda p: logistic_loss(p, xs, y, C),
                                 lambda p: _hessian(p, xs, C), p0, gtol)
    return LogisticModel(params[:-1], float(params[-1]), C, mean, scale, it)


def train_supervised(ds: SimplexDataset, C: float = 1.0, quantile: float = 0.8,
                     sub_quantile: float = 0.75) -> LogisticModel:
    """Learn closure from sub-train features and validation-window labels.

    The data before the ``quantile`` split is re-split at ``sub_quantile``
    (0.8 and 0.75 give the 60/20 sub-train/validation windows).
    """
    train = temporal_split(ds, quantile).train
    return train_supervised_window(train, C, sub_quantile)


def train_supervised_window(train: SimplexDataset, C: float = 1.0,
                            sub_quantile: float = 0.75) -> LogisticModel:
    inner = temporal_split(train, sub_quantile)
    cand = open_triangles(inner.train)
    if len(cand) == 0:
        raise ValueError("no open triangles in the sub-training window")
    y = closure_labels(inner.test, cand)
    model = fit_logistic(extract_features(inner.train, cand), y, C)
    return replace(model, windows={"sub_train_end": inner.split_time,
                                   "validation_end": float(train.times.max())})
