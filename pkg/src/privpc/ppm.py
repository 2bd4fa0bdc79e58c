"""Private power method: iterated multiply-perturb-normalize.

Each of the ``L`` iterations adds i.i.d. Gaussian noise scaled to the
infinity norm of the current iterate, so the whole run satisfies
(eps, delta) edge differential privacy with
``sigma = sqrt(4 L ln(1/delta)) / eps``.  Per-iteration cost is O(n + m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .noise import RngStream, sample_gaussian
from .spectral import SpectralSummary

AUTO = "auto"


@dataclass(frozen=True)
class PpmConfig:
    eps: float = 3.0
    delta: float = 0.01
    iters: int | str = AUTO

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if isinstance(self.iters, str):
            if self.iters != AUTO:
                raise ValueError(f"iters must be a positive integer or '{AUTO}'")
        elif self.iters < 1:
            raise ValueError("iters must be >= 1")


def ppm_sigma(eps: float, delta: float, iters: int) -> float:
    """Per-iteration noise scale ``sqrt(4 * L * ln(1/delta)) / eps``."""
    if eps <= 0 or not 0.0 < delta < 1.0 or iters < 1:
        raise ValueError("need eps > 0, delta in (0, 1), iters >= 1")
    return math.sqrt(4.0 * iters * math.log(1.0 / delta)) / eps


def auto_iterations(summary: SpectralSummary, n: int) -> int:
    """Iteration count ``round(lambda1 * ln(n) / gap)``, floored at 1."""
    if summary.gap <= 0:
        return 1
    return max(int(round(abs(summary.lambda1) * math.log(n) / summary.gap)), 1)


def resolve_iterations(config: PpmConfig, graph: Graph,
                       summary: SpectralSummary | None) -> int:
    if config.iters != AUTO:
        return int(config.iters)
    if summary is None:
        raise ValueError("iters='auto' needs a spectral summary to resolve L")
    return auto_iterations(summary, graph.n)


def run_ppm(
    graph: Graph,
    config: PpmConfig,
    rng: RngStream | int,
    summary: SpectralSummary | None = None,
    sigma_override: float | None = None,
) -> np.ndarray:
    """Run the private power method and return the final unit vector.

    ``summary`` is only consulted to resolve ``iters='auto'``.
    ``sigma_override`` is a test hook (0 recovers the non-private method).
    """
    if graph.n < 2:
        raise ValueError("need at least 2 vertices")
    rng = rng if isinstance(rng, RngStream) else RngStream(int(rng))
    iters = resolve_iterations(config, graph, summary)
    sigma = ppm_sigma(config.eps, config.delta, iters) if sigma_override is None else sigma_override

    a = graph.adjacency
    v = _random_unit(graph.n, rng)
    for _ in range(iters):
        for attempt in range(4):
            scale = float(np.abs(v).max()) * sigma
            if scale > 0.0:
                g = sample_gaussian(scale, rng, size=graph.n)
            else:
                g = np.zeros(graph.n)
            w = a @ v + g
            norm = float(np.linalg.norm(w))
            if norm > 0.0:
                break
        else:
            raise RuntimeError("iterate collapsed to zero repeatedly")
        v = w / norm
    return v


def _random_unit(n: int, rng: RngStream) -> np.ndarray:
    x = sample_gaussian(1.0, rng, size=n)
    return x / np.linalg.norm(x)
