"""Three-phase propose-test-release pipeline for the principal eigenvector.

Phase I privatizes the spectral gap statistic ``f = gap - t`` with one-sided
truncated biased Laplace noise (``f_tilde = f - z``, ``z >= 0``), so a graph
whose gap is below the threshold ``t`` can never test as well-behaved.
Phase II turns the proposed sensitivity bound ``beta`` into an integer
distance-to-instability ``phi`` (closed form, with a ceiling) and privatizes
it with Laplace noise scaled to the sensitivity of ``phi`` itself.  Phase III
compares the noisy statistic against a release threshold and, on success,
outputs the eigenvector plus Gaussian noise calibrated to ``beta``.

The draw of ``f_tilde`` happens first; the sensitivity of ``phi`` and the
bound ``beta`` are both derived from it.  This is the only ordering under
which the sensitivity bookkeeping is self-consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .graph import Graph
from .noise import RngStream, TblParams, sample_gaussian, sample_laplace, sample_tbl, tbl_delta0
from .spectral import GAP_THRESHOLD, SpectralSummary, _SQRT2

NO_RESPONSE = "no_response"
RELEASED = "released"


class ParameterInfeasibleError(ValueError):
    """The proposed-bound equation has no positive solution for this gap."""


@dataclass(frozen=True)
class PtrConfig:
    """Privacy parameters for one propose-test-release run.

    ``eps0`` pays for the gap test, ``eps1`` for the distance test, ``eps2``
    for the Gaussian release; ``delta`` is shared by the test and the release.
    ``p`` trades release probability (at least ``1 - delta**p / 2``) against
    noise level.  ``mu`` centers the truncated biased Laplace draw.
    """

    eps0: float = 1.0
    eps1: float = 3.0
    eps2: float = 3.0
    delta: float = 0.01
    p: float = 0.5
    mu: float = 3.0 * GAP_THRESHOLD

    def __post_init__(self):
        for name in ("eps0", "eps1", "eps2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must be in (0, 1], got {self.p}")
        if self.mu < 1.0:
            raise ValueError(f"mu must be >= 1, got {self.mu}")

    @property
    def eps_total(self) -> float:
        return self.eps0 + self.eps1 + self.eps2

    @property
    def delta0(self) -> float:
        return tbl_delta0(self.mu, self.eps0)

    @property
    def delta_total(self) -> float:
        return self.delta0 + self.delta


@dataclass(frozen=True)
class PtrOutcome:
    """Released noisy eigenvector or no-response, with full diagnostics.

    ``diagnostics`` holds every intermediate quantity of the run (the raw
    privatized gap statistic, phi, beta and its valid range, the release
    threshold, noise scale, and privacy totals).  Everything except the
    status and the config echo is privacy-relevant; see :meth:`to_dict`.
    """

    status: str
    vector: np.ndarray | None
    diagnostics: dict[str, Any] = field(repr=False)

    @property
    def released(self) -> bool:
        return self.status == RELEASED

    def to_dict(self, *, debug_unsafe: bool = False) -> dict[str, Any]:
        """JSON-ready form; diagnostics included only with ``debug_unsafe``."""
        out: dict[str, Any] = {"status": self.status}
        safe = ("eps0", "eps1", "eps2", "delta", "p", "mu",
                "eps_total", "delta_total", "delta0", "success_lb")
        out.update({k: self.diagnostics.get(k) for k in safe})
        if self.released:
            out["vector"] = self.vector.tolist()
        if debug_unsafe:
            out["diagnostics"] = dict(self.diagnostics)
        return out


def gs_phi(f_tilde: float, mu: float) -> float:
    """l1 global sensitivity of the distance statistic given the privatized
    gap value: ``2 + (2 - sqrt(2)) * mu`` inside the open interval (-1, 1),
    and 1 otherwise.
    """
    if -1.0 < f_tilde < 1.0:
        return 2.0 + (2.0 - _SQRT2) * mu
    return 1.0


def beta_bounds(summary: SpectralSummary) -> tuple[float, float]:
    """Open interval (beta_l, beta_u) of valid proposed sensitivity bounds.

    ``beta_l = 2 c_pi / gap`` (the local sensitivity bound itself) and
    ``beta_u = (2 sqrt(2) / gap) (2 - sqrt(2) + c_pi)``.
    """
    if summary.gap <= 0:
        raise ValueError("beta bounds require a positive eigen-gap")
    beta_l = 2.0 * summary.c_pi / summary.gap
    beta_u = (2.0 * _SQRT2 / summary.gap) * (2.0 - _SQRT2 + summary.c_pi)
    return beta_l, beta_u


def compute_beta(summary: SpectralSummary, config: PtrConfig, gs: float) -> float:
    """Proposed bound hitting the success target: the beta for which the
    pre-ceiling distance statistic equals ``(p + GS_phi) ln(1/delta) / eps1``.

    Raises:
        ParameterInfeasibleError: the target exceeds what this gap supports
            (non-positive denominator).
    """
    gap = summary.gap
    eta = (config.p + gs) * math.log(1.0 / config.delta) / config.eps1
    den = gap - eta
    if den <= 0.0:
        raise ParameterInfeasibleError(
            f"gap {gap:.4g} cannot support target {eta:.4g}; "
            "lower p, raise eps1, or raise delta"
        )
    return (2.0 / gap) * ((2.0 * eta + gap * summary.c_pi) / den)


def check_parameter_condition(summary: SpectralSummary, config: PtrConfig, gs: float) -> bool:
    """True iff ``ln(1/delta)/eps1 < (1 - 1/sqrt(2)) * gap / (p + GS_phi)``,
    which guarantees the computed beta lands inside (beta_l, beta_u).
    """
    lhs = math.log(1.0 / config.delta) / config.eps1
    rhs = (1.0 - 1.0 / _SQRT2) * summary.gap / (config.p + gs)
    return lhs < rhs


def compute_phi(summary: SpectralSummary, beta: float, gap_test_passed: bool) -> int:
    """Closed-form distance to the nearest unstable instance.

    Returns 0 when the gap test failed.  Otherwise
    ``phi = ceil((beta * gap^2 - 2 * gap * c_pi) / (4 + beta * gap))``,
    clamped below at 0 (float noise near ``beta_l`` must not leak through
    the ceiling).

    Raises:
        ValueError: the gap test passed but ``beta`` lies outside the valid
            range from :func:`beta_bounds`.
    """
    if not gap_test_passed:
        return 0
    gap = summary.gap
    beta_l, beta_u = beta_bounds(summary)
    slack = 1e-9
    if beta < beta_l * (1.0 - slack) or beta > beta_u * (1.0 + slack):
        raise ValueError(
            f"beta {beta:.6g} outside valid range ({beta_l:.6g}, {beta_u:.6g})"
        )
    num = beta * gap * gap - 2.0 * gap * summary.c_pi
    # Relative guard: at beta == beta_l the numerator is analytically zero.
    if num <= 1e-12 * max(beta * gap * gap, 2.0 * gap * summary.c_pi):
        return 0
    return max(math.ceil(num / (4.0 + beta * gap)), 0)


def success_probability_lower_bound(delta: float, p: float) -> float:
    """Lower bound ``1 - delta**p / 2`` on the release probability when beta
    targets the success equation."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must be in (0, 1]")
    return 1.0 - delta**p / 2.0


def auto_delta(m: int) -> float:
    """Default privacy slack from the edge count: ``ln(m) / m``."""
    if m < 2:
        raise ValueError("need at least 2 edges for the delta rule")
    return math.log(m) / m


def auto_p(delta: float) -> float:
    """Success-probability knob from delta: ``1 - 1/log10(1/delta)``.

    Valid for ``delta < 0.1`` (otherwise the formula leaves (0, 1] and we
    fall back to 0.5).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if delta >= 0.1:
        return 0.5
    return 1.0 - 1.0 / math.log10(1.0 / delta)


def run_ptr(
    graph: Graph,
    summary: SpectralSummary,
    config: PtrConfig,
    rng: RngStream | int,
) -> PtrOutcome:
    """Execute one propose-test-release trial.

    The run never raises on an unfavorable graph: an infeasible or
    out-of-range proposed bound is reported as a no-response with a distinct
    diagnostic flag, so parameter sweeps see a uniform outcome type.
    """
    if summary.v.size != graph.n:
        raise ValueError("summary does not belong to this graph")
    rng = rng if isinstance(rng, RngStream) else RngStream(int(rng))

    diag: dict[str, Any] = {
        "eps0": config.eps0, "eps1": config.eps1, "eps2": config.eps2,
        "delta": config.delta, "p": config.p, "mu": config.mu,
        "eps_total": config.eps_total, "delta0": config.delta0,
        "delta_total": config.delta_total,
        "success_lb": success_probability_lower_bound(config.delta, config.p),
    }

    # Phase I: private gap test.  z >= 0, so gap <= t forces f_tilde < 0.
    z = sample_tbl(TblParams(mu=config.mu, scale=1.0 / config.eps0), rng)
    f_tilde = (summary.gap - GAP_THRESHOLD) - z
    gap_test_passed = f_tilde >= 0.0
    gs = gs_phi(f_tilde, config.mu)
    diag.update(tbl_draw=z, f_tilde=f_tilde, gap_test_passed=gap_test_passed, gs_phi=gs)

    try:
        beta_l, beta_u = beta_bounds(summary)
        diag.update(beta_l=beta_l, beta_u=beta_u)
    except ValueError:
        diag.update(beta_l=None, beta_u=None)

    # A failed gap test pins the distance statistic to 0 no matter what
    # happens to beta below.
    phi_floor = None if gap_test_passed else 0

    try:
        beta = compute_beta(summary, config, gs)
    except ParameterInfeasibleError as exc:
        diag.update(beta=None, phi=phi_floor, phi_hat=None, threshold=None,
                    sigma_release=None, parameter_infeasible=True,
                    infeasible_reason=str(exc))
        return PtrOutcome(status=NO_RESPONSE, vector=None, diagnostics=diag)
    diag.update(beta=beta, parameter_infeasible=False)

    if not check_parameter_condition(summary, config, gs):
        # beta would fall outside (beta_l, beta_u); the instability-distance
        # bound is not valid there, so refuse to respond.
        diag.update(phi=phi_floor, phi_hat=None, threshold=None, sigma_release=None,
                    parameter_condition_ok=False)
        return PtrOutcome(status=NO_RESPONSE, vector=None, diagnostics=diag)
    diag.update(parameter_condition_ok=True)

    # Phase II: distance statistic and its Laplace privatization.
    phi = compute_phi(summary, beta, gap_test_passed)
    phi_hat = phi + float(sample_laplace(gs / config.eps1, rng))
    threshold = gs * math.log(1.0 / config.delta) / config.eps1
    diag.update(phi=phi, phi_hat=phi_hat, threshold=threshold)

    # Phase III: Gaussian release of the eigenvector.
    sigma = math.sqrt(2.0 * math.log(2.0 / config.delta)) * beta / config.eps2
    diag.update(sigma_release=sigma)
    if phi_hat < threshold:
        return PtrOutcome(status=NO_RESPONSE, vector=None, diagnostics=diag)

    noise = sample_gaussian(sigma, rng, size=graph.n)
    raw = summary.v + noise
    diag.update(noise_norm_sq=float(noise @ noise))
    norm = float(np.linalg.norm(raw))
    if norm == 0.0:  # probability zero in practice
        return PtrOutcome(status=NO_RESPONSE, vector=None, diagnostics=diag)
    # Normalization is the only post-processing; the sign is deliberately not
    # re-fixed, since that would consult the private data.
    return PtrOutcome(status=RELEASED, vector=raw / norm, diagnostics=diag)
