"""Top-two eigenpairs of the adjacency matrix and sensitivity statistics.

The solver runs three shifted power iterations.  Shifting by the spectral
radius makes each target eigenvalue dominant in *signed* order, which avoids
the oscillation a plain magnitude iteration hits when the extreme positive
and negative eigenvalues nearly tie (bipartite-like graphs):

1. principal pair on ``A + c*I`` (the Perron direction for connected graphs),
2. second-largest signed eigenvalue on the deflated operator
   ``x -> A x - lambda1 (v.x) v`` shifted up,
3. most-negative eigenvalue on the negated deflated operator shifted up.

The second eigenvalue by magnitude is whichever of (2) and (3) is larger in
absolute value.  All matrix-vector products cost O(n + m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph

_SQRT2 = math.sqrt(2.0)

# Gap threshold t = 2*(sqrt(2)+1) ~ 4.8284: instability-distance bounds and the
# private gap test are valid only above it.
GAP_THRESHOLD = 2.0 * (_SQRT2 + 1.0)

# Local-sensitivity bound applicability: gap > sqrt(2)*(sqrt(2)+1) ~ 3.4142.
LS_MIN_GAP = _SQRT2 * (_SQRT2 + 1.0)


class ConvergenceError(RuntimeError):
    """Power iteration failed to reach the residual tolerance."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class SpectralSummary:
    """Top-two eigenpairs by magnitude plus derived statistics.

    Attributes:
        lambda1: eigenvalue of largest magnitude (the Perron root for
            graphs with at least one edge).
        lambda2: eigenvalue of second-largest magnitude, sign preserved.
        v: unit principal eigenvector, sign-fixed so that ``sum(v) >= 0``.
        gap: ``|lambda1| - |lambda2|``, clamped at 0.
        c_pi: sqrt of the summed squares of the two largest entries of ``v``.
        iterations_used: total iterations across all three phases.
        residual: achieved ``||A v - lambda1 v||_2``.
    """

    lambda1: float
    lambda2: float
    v: np.ndarray
    gap: float
    c_pi: float
    iterations_used: int
    residual: float

    def __post_init__(self):
        self.v.setflags(write=False)


_STALL_WINDOW = 64


def _power_iterate(matvec, n, rng, tol_abs, max_iter, deflate=None, x0=None,
                   stall_tol=None):
    """Generic power iteration; returns (rayleigh, vector, iters, residual).

    ``matvec`` must be positive semidefinite-shifted so the target is the
    largest *signed* eigenvalue.  If ``deflate`` is given, the iterate is kept
    orthogonal to it throughout.

    With ``stall_tol`` set, iteration also stops once the extrapolated
    Rayleigh-quotient error drops below it.  The quotient increases
    monotonically for PSD operators and its error decays geometrically, so
    the error can be estimated from two successive window increments; this
    lets the *value* converge long before the residual (a vector criterion),
    which near-degenerate clusters may keep above ``tol_abs`` indefinitely.
    """
    x = rng.standard_normal(n) if x0 is None else x0.copy()
    if deflate is not None:
        x -= (deflate @ x) * deflate
    nx = np.linalg.norm(x)
    if nx == 0.0:  # pathological start; deterministic fallback
        x = np.ones(n) / math.sqrt(n)
    else:
        x /= nx

    theta = 0.0
    residual = math.inf
    history: list[float] = []
    for it in range(1, max_iter + 1):
        y = matvec(x)
        if deflate is not None:
            y -= (deflate @ y) * deflate
        theta = float(x @ y)
        residual = float(np.linalg.norm(y - theta * x))
        ny = float(np.linalg.norm(y))
        if residual <= tol_abs:
            return theta, x, it, residual
        if stall_tol is not None:
            history.append(theta)
            if len(history) > 2 * _STALL_WINDOW:
                delta = theta - history[-_STALL_WINDOW]
                prev = history[-_STALL_WINDOW] - history[-2 * _STALL_WINDOW]
                if delta <= abs(theta) * 1e-16:
                    return theta, x, it, residual
                if prev > 0.0:
                    # err_k ~ C q^k with q = delta/prev per window, so the
                    # remaining error is delta * q / (1 - q).
                    q = min(delta / prev, 0.999999)
                    if delta * q / (1.0 - q) <= stall_tol:
                        return theta, x, it, residual
        if ny <= 1e-300:
            # Operator annihilates the iterate: x sits in the kernel, which is
            # itself an eigenvector of the shifted operator.
            return theta, x, it, 0.0
        x = y / ny
    return theta, x, max_iter, residual


def top_two_eigenpairs(
    graph: Graph,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    seed: int = 0,
) -> SpectralSummary:
    """Compute the top-two eigenpairs (by magnitude) of the adjacency matrix.

    Deterministic for fixed ``seed``.  Convergence is declared at relative
    residual ``||A v - lambda v|| <= tol * |lambda1|``.

    Raises:
        ValueError: fewer than 2 vertices, no edges, or ``tol <= 0``.
        ConvergenceError: the principal iteration missed the tolerance within
            ``max_iter`` (retry with a different seed).
    """
    if graph.n < 2:
        raise ValueError("need at least 2 vertices")
    if graph.m < 1:
        raise ValueError("graph has no edges")
    if tol <= 0:
        raise ValueError("tol must be positive")

    a = graph.adjacency
    n = graph.n
    rng = np.random.default_rng(seed)

    # Spectral radius upper bound; shifting by it makes A + c*I PSD with the
    # Perron root on top.
    c = float(graph.degrees.max()) + 1.0
    tol_abs_seed = tol * c  # provisional scale until lambda1 is known

    theta, v, it1, res1 = _power_iterate(
        lambda x: a @ x + c * x, n, rng, tol_abs_seed, max_iter
    )
    lambda1 = theta - c
    tol_abs = tol * max(abs(lambda1), 1e-30)
    if res1 > tol_abs:
        # Continue from the current iterate with the properly scaled tolerance.
        theta, v, extra, res1 = _power_iterate(
            lambda x: a @ x + c * x, n, rng, tol_abs, max_iter, x0=v
        )
        lambda1 = theta - c
        it1 += extra
        if res1 > tol_abs:
            raise ConvergenceError(
                f"principal eigenpair did not converge: residual {res1:.3e} "
                f"after {it1} iterations (tolerance {tol_abs:.3e})",
                iterations=it1,
                residual=res1,
            )

    # Sign convention before anything downstream looks at entries.
    if v.sum() < 0:
        v = -v

    shift = abs(lambda1) + 1.0

    def deflated_plus(x):
        return a @ x - lambda1 * (v @ x) * v + shift * x

    def deflated_minus(x):
        return -(a @ x) + lambda1 * (v @ x) * v + shift * x

    # Only the eigenvalue is reported for the second pair, so the secondary
    # iterations may also exit on Rayleigh stagnation (clustered spectra would
    # otherwise keep the vector residual above tolerance indefinitely).
    stall = 0.5 * tol_abs
    theta_p, _, it2, res2 = _power_iterate(
        deflated_plus, n, rng, tol_abs, max_iter, deflate=v, stall_tol=stall
    )
    theta_m, _, it3, res3 = _power_iterate(
        deflated_minus, n, rng, tol_abs, max_iter, deflate=v, stall_tol=stall
    )
    lam_pos = theta_p - shift   # second-largest signed eigenvalue
    lam_neg = shift - theta_m   # most-negative eigenvalue
    lambda2 = lam_pos if abs(lam_pos) >= abs(lam_neg) else lam_neg

    gap = max(abs(lambda1) - abs(lambda2), 0.0)
    top2 = np.partition(v, n - 2)[n - 2:]
    c_pi = float(math.hypot(top2[0], top2[1]))

    return SpectralSummary(
        lambda1=float(lambda1),
        lambda2=float(lambda2),
        v=v.copy(),
        gap=float(gap),
        c_pi=c_pi,
        iterations_used=it1 + it2 + it3,
        residual=float(max(res1, res2, res3)),
    )


def local_sensitivity_bound(summary: SpectralSummary) -> float | None:
    """Upper bound ``2 * c_pi / gap`` on the l2 local sensitivity of the
    principal eigenvector under single-edge flips.

    Returns None (inapplicable) when ``gap <= sqrt(2)*(sqrt(2)+1)``.
    """
    if summary.gap <= LS_MIN_GAP:
        return None
    return 2.0 * summary.c_pi / summary.gap


def theta_bound(summary: SpectralSummary, dist: int) -> float | None:
    """Sensitivity bound for graphs at edge-edit distance ``dist``.

    theta = (2 / (gap - d)) * (2*d/gap + c_pi), valid when
    ``gap > 2*(sqrt(2)+1)`` and ``d < (1 - 1/sqrt(2)) * gap``; returns None
    otherwise.
    """
    if dist < 0:
        raise ValueError("dist must be >= 0")
    gap = summary.gap
    if gap <= GAP_THRESHOLD:
        return None
    if dist >= (1.0 - 1.0 / _SQRT2) * gap:
        return None
    # Association chosen so dist=0 reproduces 2*c_pi/gap bit-exactly.
    return (2.0 * (2.0 * dist / gap + summary.c_pi)) / (gap - dist)


def smooth_sensitivity_diagnostic(
    summary: SpectralSummary, n: int, eps: float, delta: float
) -> float | None:
    """Smooth upper bound on the eigenvector's sensitivity (report column).

    For large ``n`` this sits near sqrt(2), i.e. near the global sensitivity,
    which is why noise calibrated to it is not competitive.  Returns None when
    ``gap <= 2/(sqrt(2)-1)``.
    """
    if eps <= 0 or delta <= 0:
        raise ValueError("eps and delta must be positive")
    nu = _SQRT2 / (_SQRT2 - 1.0)
    if summary.gap <= _SQRT2 * nu:
        return None
    beta = eps / (4.0 * (n + math.log(2.0 / delta)))
    branch_local = (2.0 * _SQRT2 / summary.gap) * (2.0 / nu + summary.c_pi)
    branch_global = _SQRT2 * math.exp(-beta * summary.gap / nu)
    return max(branch_local, branch_global)
