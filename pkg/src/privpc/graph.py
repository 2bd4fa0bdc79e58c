"""Immutable simple undirected graphs in compressed sparse adjacency form.

The :class:`Graph` type stores per-vertex sorted neighbor lists as CSR-style
``(indptr, indices)`` arrays, with every undirected edge present in both
directions.  Graphs are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Iterator

import numpy as np
import scipy.sparse as sp


class GraphFormatError(ValueError):
    """Raised when an edge-list stream cannot be parsed into a graph."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph: no self-loops, no duplicate edges.

    Attributes:
        n: vertex count.
        m: undirected edge count (each edge stored twice in ``indices``).
        indptr: CSR offsets, shape ``(n + 1,)``.
        indices: concatenated sorted neighbor lists, shape ``(2 * m,)``.
        labels: original vertex ids, shape ``(n,)``; ``labels[i]`` is the
            input id of compacted vertex ``i``.
    """

    n: int
    m: int
    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.labels is None:
            object.__setattr__(self, "labels", np.arange(self.n, dtype=np.int64))
        for arr in (self.indptr, self.indices, self.labels):
            arr.setflags(write=False)

    # -- construction ------------------------------------------------------

    @staticmethod
    def from_edges(
        n: int,
        edges: np.ndarray | Iterable[tuple[int, int]],
        *,
        drop_self_loops: bool = False,
        labels: np.ndarray | None = None,
    ) -> "Graph":
        """Build a graph on vertices ``0..n-1`` from an iterable of pairs.

        Duplicate edges are merged; self-loops raise unless
        ``drop_self_loops`` is set.
        """
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise ValueError("edges must be an (m, 2) array of vertex pairs")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint outside [0, n)")

        loops = e[:, 0] == e[:, 1]
        if loops.any():
            if not drop_self_loops:
                raise ValueError(f"{int(loops.sum())} self-loop(s) in input; pass drop_self_loops=True")
            e = e[~loops]

        # Normalize to i < j and deduplicate.
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key = lo * np.int64(n) + hi
        _, keep = np.unique(key, return_index=True)
        lo, hi = lo[keep], hi[keep]
        m = lo.size

        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]

        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return Graph(n=n, m=int(m), indptr=indptr, indices=dst,
                     labels=labels if labels is not None else None)

    # -- basic queries -----------------------------------------------------

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbor list of vertex ``i`` (read-only view)."""
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        nbrs = self.neighbors(i)
        pos = np.searchsorted(nbrs, j)
        return pos < nbrs.size and nbrs[pos] == j

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Adjacency matrix as a scipy CSR matrix with unit weights."""
        data = np.ones(self.indices.size, dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def edges(self) -> Iterator[tuple[int, int]]:
        """Iterate undirected edges once each, as ``(i, j)`` with ``i < j``."""
        for i in range(self.n):
            for j in self.neighbors(i):
                if j > i:
                    yield i, int(j)

    def component_count(self) -> int:
        """Number of connected components (isolated vertices count)."""
        n_comp, _ = sp.csgraph.connected_components(self.adjacency, directed=False)
        return int(n_comp)

    # -- serialization -----------------------------------------------------

    def to_edge_list(self, stream: IO[str], *, use_labels: bool = False) -> None:
        """Write one ``i j`` line per undirected edge."""
        lab = self.labels
        for i, j in self.edges():
            if use_labels:
                stream.write(f"{lab[i]} {lab[j]}\n")
            else:
                stream.write(f"{i} {j}\n")


def load_edge_list(
    source: str | IO[str],
    *,
    index_base: int = 0,
    drop_self_loops: bool = False,
) -> Graph:
    """Parse a whitespace-separated edge list into a :class:`Graph`.

    Each non-comment line must hold exactly two integer tokens; lines starting
    with ``#`` or ``%`` are comments.  Vertex ids are compacted to ``[0, n)``
    and the original ids kept in ``Graph.labels``.

    Args:
        source: a path or an open text stream.
        index_base: subtracted from every id before compaction (0 or 1).
        drop_self_loops: silently drop ``i i`` lines instead of erroring.

    Raises:
        GraphFormatError: malformed line (message carries the line number) or
            an input with no edges.
    """
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return load_edge_list(fh, index_base=index_base, drop_self_loops=drop_self_loops)

    us: list[int] = []
    vs: list[int] = []
    for lineno, line in enumerate(source, start=1):
        text = line.strip()
        if not text or text[0] in "#%":
            continue
        parts = text.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two integer tokens, got {len(parts)}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer token in {text!r}") from None
        u -= index_base
        v -= index_base
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex id after applying index base")
        us.append(u)
        vs.append(v)

    if not us:
        raise GraphFormatError("input contains no edges")

    raw = np.array([us, vs], dtype=np.int64).T
    if drop_self_loops:
        raw = raw[raw[:, 0] != raw[:, 1]]
        if raw.size == 0:
            raise GraphFormatError("input contains no edges after dropping self-loops")
    labels, compact = np.unique(raw, return_inverse=True)
    compact = compact.reshape(raw.shape)
    return Graph.from_edges(
        int(labels.size), compact, drop_self_loops=drop_self_loops, labels=labels
    )


def loads_edge_list(text: str, **kwargs) -> Graph:
    """Parse an edge list from a string (see :func:`load_edge_list`)."""
    return load_edge_list(io.StringIO(text), **kwargs)


def _check_subset(subset, n: int, *, min_size: int = 0) -> np.ndarray:
    s = np.asarray(sorted(subset) if not isinstance(subset, np.ndarray) else np.sort(subset),
                   dtype=np.int64)
    if s.size and (s[0] < 0 or s[-1] >= n):
        raise ValueError("subset contains a vertex id outside [0, n)")
    if s.size > 1 and (np.diff(s) == 0).any():
        raise ValueError("subset contains duplicate vertex ids")
    if s.size < min_size:
        raise ValueError(f"subset must contain at least {min_size} vertices, got {s.size}")
    return s


def induced_edge_count(graph: Graph, subset) -> int:
    """Number of edges with both endpoints in ``subset``.

    Runs in O(sum of degrees over the subset) via sorted-list membership.
    """
    s = _check_subset(subset, graph.n)
    mask = np.zeros(graph.n, dtype=bool)
    mask[s] = True
    twice = 0
    for i in s:
        twice += int(mask[graph.neighbors(int(i))].sum())
    return twice // 2


def edge_density(graph: Graph, subset) -> float:
    """Induced edge count over ``C(k, 2)`` for a subset of size ``k >= 2``."""
    s = _check_subset(subset, graph.n, min_size=2)
    k = s.size
    return induced_edge_count(graph, s) / (k * (k - 1) / 2)
