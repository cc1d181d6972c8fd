"""Candidate open triangles and their test-set labels."""

from __future__ import annotations

import numpy as np

from .._subsets import subset_multiplicity
from ..dataset import SimplexDataset
from ..projection import build_projected_graph
from ..triangles import closed_mask, triangle_array


def open_triangles(ds: SimplexDataset) -> np.ndarray:
    """Open triangles of the projected graph, sorted rows in lexicographic order."""
    tri = triangle_array(build_projected_graph(ds))
    return tri[~closed_mask(ds, tri)]


def closure_labels(test: SimplexDataset, triples: np.ndarray) -> np.ndarray:
    """True where the triple appears together in some simplex of ``test``."""
    return subset_multiplicity(test, 3).lookup(np.asarray(triples).reshape(-1, 3)) > 0
