"""Egonet features and a multinomial logistic classifier of system domain."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import log_softmax, softmax

from .dataset import SimplexDataset
from .prediction.supervised import newton_minimize
from .projection import build_projected_graph, graph_metrics
from .triangles import fraction_open

FEATURES = ("open", "deg", "density")


@dataclass(frozen=True)
class EgonetSample:
    ego: int
    members: np.ndarray
    features: np.ndarray  # (fraction_open, log avg degree, log edge density)
    label: str | None = None
    dataset: str | None = None
    sub: SimplexDataset | None = field(default=None, repr=False)

    def with_label(self, label: str, dataset: str | None = None) -> "EgonetSample":
        return EgonetSample(self.ego, self.members, self.features, label, dataset, self.sub)


def egonet_dataset(ds: SimplexDataset, ego: int) -> tuple[np.ndarray, SimplexDataset]:
    """Members ``{ego} | N(ego)`` and the simplices intersected with them.

    Intersections with fewer than two members are dropped.  The returned
    dataset is re-densified to the members.
    """
    g = build_projected_graph(ds)
    if not 0 <= ego < ds.n_nodes:
        raise ValueError(f"node {ego} does not exist")
    members = np.union1d([ego], g.neighbors(ego))
    sub, _ = ds.restrict_nodes(members, min_size=2).compact()
    return members, sub


def egonet_features(sub: SimplexDataset) -> np.ndarray:
    _, _, frac = fraction_open(sub)
    density, avg_deg = graph_metrics(build_projected_graph(sub))
    return np.array([frac, math.log(avg_deg), math.log(density)])


def extract_egonet(ds: SimplexDataset, ego: int) -> EgonetSample:
    """Egonet of ``ego`` with its three features (raises if it has no triangle)."""
    members, sub = egonet_dataset(ds, ego)
    return EgonetSample(int(ego), members, egonet_features(sub), sub=sub)


def qualifying_egos(ds: SimplexDataset) -> np.ndarray:
    """Nodes whose egonet holds a triangle, i.e. nodes on at least one triangle."""
    a = build_projected_graph(ds).A
    per_node = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel()
    return np.flatnonzero(per_node > 0)


def sample_egonets(ds: SimplexDataset, count: int = 100,
                   rng: np.random.Generator | int | None = None) -> list[EgonetSample]:
    """Uniform sample without replacement among qualifying egonets."""
    rng = np.random.default_rng(rng)
    egos = qualifying_egos(ds)
    if len(egos) < count:
        raise ValueError(f"only {len(egos)} qualifying egonets, {count} requested")
    picked = rng.choice(egos, size=count, replace=False)
    return [extract_egonet(ds, int(u)) for u in picked]


# ----------------------------------------------------------------------
# multinomial logistic regression


def softmax_loss(params: np.ndarray, x: np.ndarray, y: np.ndarray, n_classes: int, c: float):
    """Penalized multinomial NLL and its gradient.

    ``params`` packs ``(d + 1, k)`` row-major: weights then intercepts.
    Penalty ``||W||^2 / (2C)`` excludes the intercepts.
    """
    d = x.shape[1]
    theta = params.reshape(d + 1, n_classes)
    w, b = theta[:-1], theta[-1]
    z = x @ w + b
    logp = log_softmax(z, axis=1)
    loss = float(-logp[np.arange(len(y)), y].sum() + (w * w).sum() / (2 * c))
    r = np.exp(logp)
    r[np.arange(len(y)), y] -= 1.0
    grad = np.vstack([x.T @ r + w / c, r.sum(axis=0)])
    return loss, grad.ravel()


def _softmax_hessian(params, x, n_classes, c):
    d = x.shape[1]
    theta = params.reshape(d + 1, n_classes)
    p = softmax(x @ theta[:-1] + theta[-1], axis=1)
    xa = np.column_stack([x, np.ones(len(x))])
    k = n_classes
    h = np.zeros((d + 1, k, d + 1, k))
    for a in range(k):
        for b in range(k):
            s = p[:, a] * ((a == b) - p[:, b])
            h[:, a, :, b] = xa.T @ (xa * s[:, None])
    h = h.reshape((d + 1) * k, (d + 1) * k)
    pen = np.zeros((d + 1, k))
    pen[:-1] = 1.0 / c
    h[np.diag_indices_from(h)] += pen.ravel()
    return h


@dataclass(frozen=True)
class MultinomialModel:
    weights: np.ndarray  # (d, k)
    intercepts: np.ndarray  # (k,)
    classes: tuple
    C: float

    def proba(self, x: np.ndarray) -> np.ndarray:
        return softmax(np.asarray(x) @ self.weights + self.intercepts, axis=1)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.classes, dtype=object)[self.proba(x).argmax(axis=1)]


def fit_multinomial(x: np.ndarray, labels: Sequence, C: float = 10.0,
                    gtol: float = 1e-6) -> MultinomialModel:
    x = np.asarray(x, dtype=np.float64)
    classes, y = np.unique(np.asarray(labels, dtype=object), return_inverse=True)
    if len(classes) < 2:
        raise ValueError("need at least two classes")
    k, d = len(classes), x.shape[1]
    params, _ = newton_minimize(lambda p: softmax_loss(p, x, y, k, C),
                                lambda p: _softmax_hessian(p, x, k, C),
                                np.zeros((d + 1) * k), gtol)
    theta = params.reshape(d + 1, k)
    return MultinomialModel(theta[:-1], theta[-1], tuple(classes), C)


@dataclass(frozen=True)
class ClassifierStats:
    mean_accuracy: float
    std: float
    per_trial: list[float]

    def as_dict(self) -> dict:
        return {"mean_accuracy": self.mean_accuracy, "std": self.std,
                "per_trial": self.per_trial}


def _columns(feature_subset) -> list[int]:
    if feature_subset is None:
        return list(range(len(FEATURES)))
    cols = []
    for f in feature_subset:
        if f not in FEATURES:
            raise ValueError(f"unknown egonet feature {f!r}; choose from {', '.join(FEATURES)}")
        cols.append(FEATURES.index(f))
    return cols


def _group(samples: Sequence[EgonetSample]) -> dict[str, list[EgonetSample]]:
    groups: dict[str, list[EgonetSample]] = {}
    for s in samples:
        if s.label is None:
            raise ValueError("every sample needs a domain label")
        groups.setdefault(s.dataset or s.label, []).append(s)
    return groups


def _one_trial(groups, cols, train_per_dataset, rng, C) -> float:
    xtr, ytr, xte, yte = [], [], [], []
    for name in sorted(groups):
        items = groups[name]
        perm = rng.permutation(len(items))
        for rank, i in enumerate(perm):
            s = items[i]
            (xtr if rank < train_per_dataset else xte).append(s.features[cols])
            (ytr if rank < train_per_dataset else yte).append(s.label)
    if not xte:
        raise ValueError("no held-out samples; each dataset needs more than the train count")
    model = fit_multinomial(np.array(xtr), ytr, C)
    return float(np.mean(model.predict(np.array(xte)) == np.asarray(yte, dtype=object)))


def train_domain_classifier(samples: Sequence[EgonetSample], feature_subset=None,
                            train_per_dataset: int = 80, trials: int = 20,
                            rng: np.random.Generator | int | None = 0,
                            C: float = 10.0) -> ClassifierStats:
    """Repeated random train/test splits within each dataset of labeled egonets."""
    rng = np.random.default_rng(rng)
    groups = _group(samples)
    if len({s.label for s in samples}) < 2:
        raise ValueError("need at least two domains")
    small = [k for k, v in groups.items() if len(v) <= train_per_dataset]
    if small:
        raise ValueError(f"dataset {small[0]!r} has no samples left for testing")
    cols = _columns(feature_subset)
    acc = [_one_trial(groups, cols, train_per_dataset, rng, C) for _ in range(trials)]
    return ClassifierStats(float(np.mean(acc)), float(np.std(acc)), acc)


def egonet_experiment(datasets: Sequence[tuple[SimplexDataset, str, str]], feature_subset=None,
                      count: int = 100, train_per_dataset: int = 80, trials: int = 20,
                      seed: int = 0, C: float = 10.0) -> ClassifierStats:
    """Fresh egonet samples per trial, then an 80/20 split within each dataset.

    ``datasets`` holds ``(dataset, domain label, dataset name)`` triples.
    """
    cols = _columns(feature_subset)
    root = np.random.SeedSequence(seed)
    acc = []
    for trial_seq in root.spawn(trials):
        rng = np.random.default_rng(trial_seq)
        samples = []
        for ds, label, name in datasets:
            samples += [s.with_label(label, name) for s in sample_egonets(ds, count, rng)]
        acc.append(_one_trial(_group(samples), cols, train_per_dataset, rng, C))
    return ClassifierStats(float(np.mean(acc)), float(np.std(acc)), acc)
