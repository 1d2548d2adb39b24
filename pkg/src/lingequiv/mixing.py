"""Weighted models, mixing matrices, numeric rank queries, data sampling.

A weighted model attaches edge coefficients to a digraph; its mixing
matrix is the observed-row block of (I - B)^-1 and carries the generic
rank structure that the recovery pipeline queries.  Scrambling simulates
the column scaling/permutation indeterminacy of overcomplete ICA output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .digraph import Digraph
from .errors import GraphFormatError, SingularModelError

WEIGHT_LOW, WEIGHT_HIGH = 0.5, 2.5
SCALE_LOW, SCALE_HIGH = 0.2, 5.0
DEFAULT_TOL = 1e-9
CONFIDENCE_ALPHA = 25.0
CONFIDENCE_EPS = 0.02
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class WeightedModel:
    graph: Digraph
    weights: np.ndarray  # B with B[head, tail] != 0 only for edges tail->head

    def __post_init__(self):
        b = np.asarray(self.weights, dtype=float)
        n = self.graph.n
        if b.shape != (n, n):
            raise GraphFormatError(f"weight matrix must be {n}x{n}")
        for head, tail in zip(*np.nonzero(b)):
            if not self.graph.has_edge(int(tail), int(head)):
                raise GraphFormatError(
                    f"nonzero weight at ({head},{tail}) without edge "
                    f"{tail}->{head}")
        object.__setattr__(self, "weights", b)


@dataclass(frozen=True)
class MixingMatrix:
    values: np.ndarray                      # |X| x |V|
    row_labels: tuple[str, ...]             # observed labels
    col_labels: Optional[tuple[str, ...]]   # None once scrambled/anonymous

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def num_observed(self) -> int:
        return self.values.shape[0]

    @property
    def num_columns(self) -> int:
        return self.values.shape[1]


def sample_weights(g: Digraph, seed: int) -> WeightedModel:
    """Draw each edge weight uniformly from [-2.5,-0.5] u [0.5,2.5];
    resample (up to 100 times) whenever I - B is numerically singular."""
    rng = np.random.default_rng(seed)
    n = g.n
    edges = sorted(g.edges)
    for _ in range(100):
        b = np.zeros((n, n))
        for tail, head in edges:
            b[head, tail] = rng.uniform(WEIGHT_LOW, WEIGHT_HIGH) * rng.choice([-1.0, 1.0])
        i_minus_b = np.eye(n) - b
        if np.linalg.cond(i_minus_b) < _COND_LIMIT:
            return WeightedModel(g, b)
    raise SingularModelError(
        "I - B stayed numerically singular after 100 weight resamples")


def mixing(model: WeightedModel) -> MixingMatrix:
    """Observed rows of (I - B)^-1."""
    g = model.graph
    i_minus_b = np.eye(g.n) - model.weights
    cond = np.linalg.cond(i_minus_b)
    if cond > _COND_LIMIT:
        raise SingularModelError(f"I - B is singular (condition ~ {cond:.3e})")
    full = np.linalg.inv(i_minus_b)
    obs = sorted(g.observed)
    return MixingMatrix(
        values=full[obs, :],
        row_labels=tuple(g.labels[v] for v in obs),
        col_labels=tuple(g.labels),
    )


def scramble(a: MixingMatrix, seed: int) -> MixingMatrix:
    """Permute and rescale columns (nonzero factors, magnitude in
    [0.2, 5]); drops column labels, as an OICA consumer must not see them."""
    rng = np.random.default_rng(seed)
    d = a.num_columns
    perm = rng.permutation(d)
    scales = rng.uniform(SCALE_LOW, SCALE_HIGH, size=d) * rng.choice([-1.0, 1.0], size=d)
    return MixingMatrix(
        values=a.values[:, perm] * scales,
        row_labels=a.row_labels,
        col_labels=None,
    )


def numeric_rank(block: np.ndarray, tol: float = DEFAULT_TOL,
                 scale: float | None = None) -> int:
    """Singular values above tol relative to the largest.

    ``scale`` optionally supplies an outer reference scale (e.g. the top
    singular value of the full matrix a block was cut from) so that a block
    that is numerically zero overall is not judged against its own rounding
    noise.
    """
    block = np.asarray(block, dtype=float)
    if block.size == 0:
        return 0
    svals = np.linalg.svd(block, compute_uv=False)
    top = max(svals[0], scale or 0.0)
    if top == 0.0:
        return 0
    return int(np.sum(svals > tol * top))


def fullrank_confidence(block: np.ndarray, alpha: float = CONFIDENCE_ALPHA,
                        eps: float = CONFIDENCE_EPS) -> float:
    """Sigmoid score that the block has full (min-dimension) rank."""
    block = np.asarray(block, dtype=float)
    if min(block.shape) == 0:
        return 1.0
    sigma_min = np.linalg.svd(block, compute_uv=False)[-1]
    return float(1.0 / (1.0 + np.exp(-alpha * (sigma_min - eps))))


def sample_data(model: WeightedModel, num_samples: int, seed: int) -> np.ndarray:
    """Observed samples X = (A E)_{X,:} with iid uniform [-0.5, 0.5] noise,
    returned as num_samples x |X|."""
    rng = np.random.default_rng(seed)
    a = mixing(model)
    noise = rng.uniform(-0.5, 0.5, size=(model.graph.n, num_samples))
    return (a.values @ noise).T


# -- CSV round trip -----------------------------------------------------------


def write_mixing_csv(a: MixingMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        cols = a.col_labels or ("anon",) * a.num_columns
        fh.write("," + ",".join(cols) + "\n")
        for label, row in zip(a.row_labels, a.values):
            fh.write(label + "," + ",".join(f"{v:.17g}" for v in row) + "\n")


def read_mixing_csv(path) -> MixingMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise GraphFormatError("empty mixing file")
    header = lines[0].split(",")[1:]
    col_labels = None if all(h == "anon" for h in header) else tuple(header)
    row_labels = []
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        row_labels.append(parts[0])
        rows.append([float(v) for v in parts[1:]])
    values = np.array(rows, dtype=float)
    if col_labels is not None and len(col_labels) != values.shape[1]:
        raise GraphFormatError("column label count does not match values")
    return MixingMatrix(values=values, row_labels=tuple(row_labels),
                        col_labels=col_labels)
