"""Scikit-learn style estimators wrapping the release mechanisms.

Each estimator takes an adjacency structure in ``fit`` (a :class:`Graph`, a
scipy sparse matrix, or a dense square array), computes or privatizes the
principal eigenvector, and exposes the result through fitted attributes.
``get_params`` / ``set_params`` / ``clone`` work as usual, so the mechanisms
compose with parameter sweeps and pipelines from the wider ecosystem.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .graph import Graph
from .noise import RngStream, sample_gaussian
from .ppm import AUTO, PpmConfig, resolve_iterations, run_ppm
from .ptr import PtrConfig, auto_delta, auto_p, run_ptr
from .spectral import SpectralSummary, top_two_eigenpairs
from .subsets import SubsetResult, dks_extract, top_k_abs_subset

# Global l2 sensitivity of a unit eigenvector under a single edge flip.
GLOBAL_SENSITIVITY = math.sqrt(2.0)


def as_graph(X) -> Graph:
    """Validate and convert estimator input into a :class:`Graph`.

    Accepts a :class:`Graph`, any scipy sparse matrix, or a dense square
    array; the nonzero pattern must be symmetric with an empty diagonal.
    """
    if isinstance(X, Graph):
        return X
    if sp.issparse(X):
        mat = X.tocsr()
    else:
        arr = np.asarray(X)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {arr.shape}")
        mat = sp.csr_matrix(arr)
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {mat.shape}")
    mat = mat.astype(bool)
    if mat.diagonal().any():
        raise ValueError("adjacency must have an empty diagonal (no self-loops)")
    if (mat != mat.T).nnz != 0:
        raise ValueError("adjacency pattern must be symmetric (undirected graph)")
    coo = sp.triu(mat, k=1).tocoo()
    edges = np.column_stack([coo.row, coo.col]).astype(np.int64)
    return Graph.from_edges(mat.shape[0], edges)


def _resolve_rng(random_state) -> RngStream:
    if random_state is None:
        return RngStream(0)
    if isinstance(random_state, RngStream):
        return random_state
    return RngStream(int(random_state))


class _EigenvectorEstimator(BaseEstimator):
    """Shared fit skeleton: validate, eigensolve, delegate to the mechanism."""

    tol: float
    max_iter: int

    def fit(self, X, y=None):
        graph = as_graph(X)
        self.graph_ = graph
        self.n_features_in_ = graph.n
        self.summary_ = top_two_eigenpairs(graph, tol=self.tol, max_iter=self.max_iter)
        self._release(graph)
        return self

    def _release(self, graph: Graph):  # pragma: no cover - abstract
        raise NotImplementedError

    def _fitted_component(self) -> np.ndarray:
        if not hasattr(self, "component_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")
        if self.component_ is None:
            raise RuntimeError("mechanism returned no response; nothing to post-process")
        return self.component_

    def top_k_subset(self, k: int) -> SubsetResult:
        """Subset maximizing the absolute eigenscore sum (post-processing)."""
        return top_k_abs_subset(self._fitted_component(), k)

    def densest_subgraph(self, k: int) -> SubsetResult:
        """Rank-1 densest-k-subgraph approximation (post-processing)."""
        return dks_extract(self.graph_, self._fitted_component(), k)


class NonprivateEigenvector(_EigenvectorEstimator):
    """Exact principal eigenvector of the adjacency matrix (no privacy).

    Attributes:
        component_: unit principal eigenvector, sign-fixed.
        summary_: top-two eigenpair summary.
    """

    def __init__(self, tol: float = 1e-10, max_iter: int = 100_000):
        self.tol = tol
        self.max_iter = max_iter

    def _release(self, graph: Graph):
        self.component_ = self.summary_.v
        self.released_ = True


class GaussianEigenvector(_EigenvectorEstimator):
    """Gaussian mechanism calibrated to the global sensitivity sqrt(2).

    The worst-case baseline: output perturbation with
    ``sigma^2 = 2 * 2 * ln(2/delta) / eps^2`` regardless of the instance.

    Parameters:
        eps, delta: (eps, delta)-DP budget of the release.
        random_state: seed or :class:`~privpc.noise.RngStream`.
    """

    def __init__(self, eps: float = 3.0, delta: float = 0.01,
                 tol: float = 1e-10, max_iter: int = 100_000, random_state=None):
        self.eps = eps
        self.delta = delta
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def _release(self, graph: Graph):
        if self.eps <= 0 or not 0.0 < self.delta < 1.0:
            raise ValueError("need eps > 0 and delta in (0, 1)")
        rng = _resolve_rng(self.random_state)
        sigma = GLOBAL_SENSITIVITY * math.sqrt(2.0 * math.log(2.0 / self.delta)) / self.eps
        self.sigma_ = sigma
        self.component_ = self.summary_.v + sample_gaussian(sigma, rng, size=graph.n)
        self.released_ = True


class PowerMethodEigenvector(_EigenvectorEstimator):
    """Private power method (iterative mechanism).

    Parameters:
        eps, delta: (eps, delta)-DP budget of the whole run.
        iters: iteration count, or ``'auto'`` for
            ``round(lambda1 * ln(n) / gap)``.
        random_state: seed or :class:`~privpc.noise.RngStream`.

    Attributes:
        component_: the final unit iterate.
        iters_: resolved iteration count.
    """

    def __init__(self, eps: float = 3.0, delta: float = 0.01, iters: int | str = AUTO,
                 tol: float = 1e-10, max_iter: int = 100_000, random_state=None):
        self.eps = eps
        self.delta = delta
        self.iters = iters
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def _release(self, graph: Graph):
        config = PpmConfig(eps=self.eps, delta=self.delta, iters=self.iters)
        self.iters_ = resolve_iterations(config, graph, self.summary_)
        self.component_ = run_ppm(
            graph, config, _resolve_rng(self.random_state), summary=self.summary_
        )
        self.released_ = True


class PtrEigenvector(_EigenvectorEstimator):
    """Propose-test-release mechanism with instance-specific noise.

    One-shot output perturbation: a private gap test and a private
    distance-to-instability test decide whether releasing with noise
    calibrated to the instance-specific bound is safe; otherwise the fit
    yields no response (``component_ is None``, ``released_ is False``).

    Parameters:
        eps0, eps1, eps2: budget split across gap test, distance test,
            release.
        delta: shared slack, or ``'auto'`` for ``ln(m)/m``.
        p: success knob in (0, 1], or ``'auto'`` (from delta).
        mu: truncated-Laplace center, default three times the gap threshold.
        random_state: seed or :class:`~privpc.noise.RngStream`.

    Attributes:
        outcome_: full :class:`~privpc.ptr.PtrOutcome` with diagnostics.
        component_: released unit vector, or None on no-response.
    """

    def __init__(self, eps0: float = 1.0, eps1: float = 3.0, eps2: float = 3.0,
                 delta: float | str = "auto", p: float | str = "auto",
                 mu: float | None = None, tol: float = 1e-10,
                 max_iter: int = 100_000, random_state=None):
        self.eps0 = eps0
        self.eps1 = eps1
        self.eps2 = eps2
        self.delta = delta
        self.p = p
        self.mu = mu
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def resolved_config(self, graph: Graph) -> PtrConfig:
        delta = auto_delta(graph.m) if self.delta == "auto" else float(self.delta)
        p = auto_p(delta) if self.p == "auto" else float(self.p)
        kwargs = dict(eps0=self.eps0, eps1=self.eps1, eps2=self.eps2, delta=delta, p=p)
        if self.mu is not None:
            kwargs["mu"] = self.mu
        return PtrConfig(**kwargs)

    def _release(self, graph: Graph):
        config = self.resolved_config(graph)
        self.config_ = config
        self.outcome_ = run_ptr(graph, self.summary_, config, _resolve_rng(self.random_state))
        self.component_ = self.outcome_.vector
        self.released_ = self.outcome_.released
