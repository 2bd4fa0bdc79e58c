"""Seeded synthetic graph generators for experiments and tests.

All generators are deterministic for a fixed seed.  The Erdos-Renyi sampler
draws the edge set directly (no per-pair loop), so it stays fast at the
hundred-thousand-vertex scale used by the benchmark harness.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    i, j = np.triu_indices(n, k=1)
    return Graph.from_edges(n, np.column_stack([i, j]))


def star_graph(n: int) -> Graph:
    """Hub vertex 0 connected to the ``n - 1`` leaves."""
    if n < 2:
        raise ValueError("star graph needs n >= 2")
    leaves = np.arange(1, n, dtype=np.int64)
    return Graph.from_edges(n, np.column_stack([np.zeros(n - 1, dtype=np.int64), leaves]))


def _pair_index_to_edge(n: int, lin: np.ndarray) -> np.ndarray:
    """Decode linear upper-triangle indices into (i, j) pairs with i < j."""
    # offset(i) = i*n - i*(i+1)/2 counts pairs whose first endpoint is < i.
    b = 2 * n - 1
    i = ((b - np.sqrt(b * b - 8.0 * lin)) // 2).astype(np.int64)
    off = i * n - i * (i + 1) // 2
    # Fix float rounding at bucket boundaries.
    too_far = off > lin
    i[too_far] -= 1
    off = i * n - i * (i + 1) // 2
    nxt = off + (n - 1 - i)
    short = lin >= nxt
    i[short] += 1
    off = i * n - i * (i + 1) // 2
    j = lin - off + i + 1
    return np.column_stack([i, j])


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p): each of the C(n, 2) pairs is an edge independently."""
    if not 0.0 < p <= 1.0:
        raise ValueError("edge probability must be in (0, 1]")
    if n < 2:
        raise ValueError("G(n, p) needs n >= 2")
    rng = np.random.default_rng(seed)
    total = n * (n - 1) // 2
    m = int(rng.binomial(total, p))
    # Uniform m-subset of pair indices: oversample, dedupe, top up if short.
    lin = np.unique(rng.integers(0, total, size=int(m * 1.1) + 16, dtype=np.int64))
    while lin.size < m:
        extra = rng.integers(0, total, size=m, dtype=np.int64)
        lin = np.unique(np.concatenate([lin, extra]))
    lin = rng.permutation(lin)[:m]
    return Graph.from_edges(n, _pair_index_to_edge(n, lin))


def planted_clique(n: int, clique_size: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi background with a clique planted on vertices 0..clique_size-1."""
    if not 2 <= clique_size <= n:
        raise ValueError("clique size must be in [2, n]")
    background = erdos_renyi(n, p, seed)
    ci, cj = np.triu_indices(clique_size, k=1)
    bg_edges = np.array(list(background.edges()), dtype=np.int64).reshape(-1, 2)
    edges = np.concatenate([bg_edges, np.column_stack([ci, cj])])
    return Graph.from_edges(n, edges)


def random_regular(n: int, d: int, seed: int) -> Graph:
    """Random d-regular simple graph via stub pairing with edge-swap repair.

    Every vertex gets exactly ``d`` stubs; a random perfect matching of the
    stubs is repaired by 2-swaps until no self-loops or parallel edges remain.
    """
    if d < 1 or d >= n or (n * d) % 2 != 0:
        raise ValueError("need 1 <= d < n with n*d even")
    rng = np.random.default_rng(seed)
    for _ in range(50):
        stubs = rng.permutation(np.repeat(np.arange(n, dtype=np.int64), d))
        u, v = stubs[0::2].copy(), stubs[1::2].copy()
        if _repair_matching(u, v, n, rng):
            return Graph.from_edges(n, np.column_stack([u, v]))
    raise RuntimeError("regular graph repair failed to converge; try another seed")


def _repair_matching(u: np.ndarray, v: np.ndarray, n: int, rng: np.random.Generator) -> bool:
    m = u.size
    seen: dict[tuple[int, int], int] = {}
    bad: list[int] = []
    for idx in range(m):
        key = (int(min(u[idx], v[idx])), int(max(u[idx], v[idx])))
        if key[0] == key[1] or key in seen:
            bad.append(idx)
        else:
            seen[key] = idx

    attempts = 0
    while bad and attempts < 200 * m:
        attempts += 1
        idx = bad[-1]
        other = int(rng.integers(0, m))
        a, b = int(u[idx]), int(v[idx])
        x, y = int(u[other]), int(v[other])
        okey = (min(x, y), max(x, y))
        if other == idx or seen.get(okey) != other:
            continue
        # Swap partners: (a,b),(x,y) -> (a,x),(b,y).
        k1 = (min(a, x), max(a, x))
        k2 = (min(b, y), max(b, y))
        if a == x or b == y or k1 in seen or k2 in seen or k1 == k2:
            continue
        del seen[okey]
        u[idx], v[idx] = a, x
        u[other], v[other] = b, y
        seen[k1] = idx
        seen[k2] = other
        bad.pop()
    return not bad
