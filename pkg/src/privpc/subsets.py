"""Post-processing of (private) eigenvectors into vertex subsets.

These are pure functions of the released vector and public quantities, so by
the post-processing property they inherit whatever privacy guarantee the
vector carries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, edge_density, _check_subset
from .spectral import SpectralSummary

TOP_K = "top"
BOTTOM_K = "bottom"


@dataclass(frozen=True)
class SubsetResult:
    """A k-vertex subset with its objective value and provenance.

    ``objective`` is ``|sum of the selected entries|`` for the winning
    candidate; ``candidate`` records whether the top-k or bottom-k support
    won the absolute-value argmax.  ``density`` is filled when a graph was
    supplied.
    """

    members: np.ndarray
    objective: float
    candidate: str
    density: float | None = None

    def __post_init__(self):
        self.members.setflags(write=False)


def top_k_abs_subset(vector: np.ndarray, k: int) -> SubsetResult:
    """Maximize ``|v.x|`` over k-subsets by comparing the two candidates.

    The maximizer over binary selection vectors is either the support of the
    k largest entries (signed) or of the k smallest; the winner is whichever
    attains the larger absolute sum.  Entry ties break toward the lower
    vertex id, and an exact objective tie breaks toward the top-k candidate.
    """
    v = np.asarray(vector, dtype=np.float64)
    n = v.size
    if not 2 <= k <= n:
        raise ValueError(f"k must be in [2, n={n}], got {k}")
    idx = np.arange(n)
    by_value = np.lexsort((idx, v))  # ascending value, lower id first on ties
    bottom = by_value[:k]
    top = np.lexsort((idx, -v))[:k]
    top_sum = float(v[top].sum())
    bottom_sum = float(v[bottom].sum())
    if abs(top_sum) >= abs(bottom_sum):
        return SubsetResult(members=np.sort(top), objective=abs(top_sum), candidate=TOP_K)
    return SubsetResult(members=np.sort(bottom), objective=abs(bottom_sum), candidate=BOTTOM_K)


def dks_extract(graph: Graph, vector: np.ndarray, k: int) -> SubsetResult:
    """Rank-1 densest-k-subgraph approximation: select via
    :func:`top_k_abs_subset`, then fill in the induced edge density."""
    if np.asarray(vector).size != graph.n:
        raise ValueError("vector length does not match the graph")
    result = top_k_abs_subset(vector, k)
    return SubsetResult(
        members=result.members,
        objective=result.objective,
        candidate=result.candidate,
        density=edge_density(graph, result.members),
    )


def dks_upper_bound(summary: SpectralSummary, graph: Graph, k: int) -> float:
    """Upper bound on the optimal size-k edge density from the top spectrum.

    min of three terms: the rank-1 quadratic form of the non-private top-k
    support plus a ``|lambda2|/(k-1)`` correction, ``|lambda1|/(k-1)``, and 1.
    Non-private diagnostic; never release it alongside private outputs
    without labeling it as such.
    """
    if not 2 <= k <= graph.n:
        raise ValueError(f"k must be in [2, n={graph.n}], got {k}")
    v = summary.v
    # Non-private top-k support by signed value maximizes v.x.
    top = np.lexsort((np.arange(v.size), -v))[:k]
    quad = abs(summary.lambda1) * float(v[top].sum()) ** 2
    term1 = quad / (k * (k - 1)) + abs(summary.lambda2) / (k - 1)
    term2 = abs(summary.lambda1) / (k - 1)
    return min(term1, term2, 1.0)


def jaccard(a, b) -> float:
    """|a & b| / |a | b|, with two empty sets defined as similarity 1."""
    sa, sb = set(map(int, np.asarray(a, dtype=np.int64).ravel())), \
        set(map(int, np.asarray(b, dtype=np.int64).ravel()))
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


def exact_dks_density(graph: Graph, k: int) -> float:
    """Exact densest-k-subgraph density by exhaustive enumeration.

    Only viable for tiny graphs; used as the oracle side of the upper-bound
    soundness checks.
    """
    from itertools import combinations

    if not 2 <= k <= graph.n:
        raise ValueError(f"k must be in [2, n={graph.n}], got {k}")
    best = 0.0
    for combo in combinations(range(graph.n), k):
        best = max(best, edge_density(graph, _check_subset(combo, graph.n)))
    return best
