"""Score-function registry and ranking of candidate open triangles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dataset import DatasetSplit
from ..projection import build_incidence, build_projected_graph
from . import scores as sc
from .candidates import closure_labels, open_triangles
from .hodge import build_hodge, sppr_triple_scores
from .paths import katz_scores, ppr_scores
from .supervised import extract_features, train_supervised_window

MEAN_ALIASES = {"harmonic": -1.0, "geometric": 0.0, "arithmetic": 1.0}
LOCAL = {"cn", "jaccard", "aa", "pa-deg", "pa-simp"}
KINDS = ("genmean", *sorted(LOCAL), "katz", "ppr", "sppr", "logreg", "random")


@dataclass(frozen=True)
class ScoreFunction:
    """A parsed score name such as ``harmonic``, ``genmean:2``, ``katz:w`` or ``sppr-curl``."""

    kind: str
    p: float | None = None
    weighted: bool = False
    component: str | None = None

    @classmethod
    def parse(cls, text: str) -> "ScoreFunction":
        t = text.strip().lower()
        if t in MEAN_ALIASES:
            return cls("genmean", p=MEAN_ALIASES[t])
        if t.startswith("genmean:"):
            raw = t.split(":", 1)[1]
            try:
                p = float(raw)
            except ValueError:
                raise ValueError(f"bad generalized-mean exponent {raw!r}") from None
            if math.isnan(p):
                raise ValueError("generalized-mean exponent cannot be NaN")
            return cls("genmean", p=p)
        if t in LOCAL or t in ("logreg", "random"):
            return cls(t)
        if t in ("katz", "katz:w", "ppr", "ppr:w"):
            return cls(t.split(":")[0], weighted=t.endswith(":w"))
        if t == "sppr":
            return cls("sppr")
        if t in ("sppr-grad", "sppr-curl", "sppr-harm"):
            return cls("sppr", component=t.split("-")[1])
        raise ValueError(f"unknown score function {text!r}")

    @property
    def label(self) -> str:
        if self.kind == "genmean":
            return f"genmean:{self.p:g}"
        if self.kind in ("katz", "ppr"):
            return self.kind + (":w" if self.weighted else "")
        if self.kind == "sppr" and self.component:
            return f"sppr-{self.component}"
        return self.kind


@dataclass(frozen=True)
class ScoreSet:
    """Candidates in rank order: descending score, ties by ascending node triple."""

    triples: np.ndarray
    scores: np.ndarray
    labels: np.ndarray
    name: str = ""

    @classmethod
    def from_unsorted(cls, triples, scores, labels, name: str = "") -> "ScoreSet":
        triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
        scores = np.asarray(scores, dtype=np.float64)
        labels = np.asarray(labels, dtype=bool)
        if np.any(np.isnan(scores)):
            raise ValueError("scores contain NaN")
        order = np.lexsort((triples[:, 2], triples[:, 1], triples[:, 0], -scores))
        return cls(triples[order], scores[order], labels[order], name)

    def __len__(self) -> int:
        return len(self.scores)

    @property
    def prevalence(self) -> float:
        return float(self.labels.mean()) if len(self) else math.nan

    def top(self, k: int) -> "ScoreSet":
        return ScoreSet(self.triples[:k], self.scores[:k], self.labels[:k], self.name)


def score_triples(split: DatasetSplit, fn: ScoreFunction, triples: np.ndarray,
                  alpha: float = 0.85, seed: int = 0, C: float = 1.0) -> np.ndarray:
    """Scores of ``triples`` (open triangles of ``split.train``) under ``fn``."""
    train = split.train
    g = build_projected_graph(train)
    kind = fn.kind
    if kind == "genmean":
        return sc.weight_scores(g, triples, fn.p)
    if kind == "cn":
        return sc.common_neighbors(g, triples)
    if kind == "jaccard":
        return sc.jaccard(g, triples)
    if kind == "aa":
        return sc.adamic_adar(g, triples)
    if kind == "pa-deg":
        return sc.pref_attach_projected(g, triples)
    if kind == "pa-simp":
        return sc.pref_attach_simplicial(build_incidence(train), triples)
    if kind == "katz":
        return katz_scores(g, fn.weighted).triple_scores(triples, both_directions=False)
    if kind == "ppr":
        pairs = ppr_scores(g, fn.weighted, alpha, skip_isolated=True)
        return pairs.triple_scores(triples, both_directions=True)
    if kind == "sppr":
        return sppr_triple_scores(build_hodge(train), triples, alpha, fn.component)
    if kind == "logreg":
        model = train_supervised_window(train, C)
        return model.predict_proba(extract_features(train, triples))
    if kind == "random":
        return np.random.default_rng(seed).random(len(triples))
    raise ValueError(f"unknown score kind {kind!r}")


def rank_candidates(split: DatasetSplit, fn: ScoreFunction | str, alpha: float = 0.85,
                    seed: int = 0, C: float = 1.0) -> ScoreSet:
    """Score and rank every open triangle of the train window.

    A candidate is labeled positive when its three nodes appear together in
    a test simplex.
    """
    if isinstance(fn, str):
        fn = ScoreFunction.parse(fn)
    cand = open_triangles(split.train)
    labels = closure_labels(split.test, cand)
    s = score_triples(split, fn, cand, alpha, seed, C) if len(cand) else np.zeros(0)
    return ScoreSet.from_unsorted(cand, s, labels, fn.label)
