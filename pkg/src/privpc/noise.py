"""Seeded inverse-CDF samplers for Laplace, Gaussian, and truncated biased
Laplace (TBL) noise, plus the TBL privacy-calibration arithmetic.

Every sampler consumes uniforms from an :class:`RngStream` and maps them
through an inverse CDF, so identical ``(seed, stream)`` pairs reproduce
identical noise sequences.  No rejection sampling is used anywhere.

These are floating-point mechanisms: they are not hardened against
finite-precision side channels (see the README's limitations section).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri


@dataclass
class RngStream:
    """Deterministic uniform stream keyed by ``(seed, stream)``.

    Parallel trials should use distinct stream ids (convention: the trial
    index) so draws never overlap.
    """

    seed: int
    stream: int = 0
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((self.seed, self.stream)))
        )

    def uniform(self, size: int | None = None):
        """Uniform draw(s) in the open interval (0, 1).

        Integers in [1, 2^53) are scaled by 2^-53, which keeps both endpoints
        strictly excluded so inverse CDFs never see 0 or 1.
        """
        raw = self._gen.integers(1, 1 << 53, size=size)
        return raw / float(1 << 53)


def _coerce_rng(rng) -> RngStream:
    # Anything exposing .uniform(size) works; ints are treated as seeds.
    return rng if hasattr(rng, "uniform") else RngStream(int(rng))


def sample_laplace(scale: float, rng: RngStream | int, size: int | None = None):
    """Draw from Lap(0, scale) via the inverse CDF."""
    if scale <= 0:
        raise ValueError(f"Laplace scale must be positive, got {scale}")
    u = _coerce_rng(rng).uniform(size)
    return -scale * np.sign(u - 0.5) * np.log1p(-2.0 * np.abs(u - 0.5))


def sample_gaussian(sigma: float, rng: RngStream | int, size: int | None = None):
    """Draw from N(0, sigma^2) via the inverse normal CDF."""
    if sigma <= 0:
        raise ValueError(f"Gaussian sigma must be positive, got {sigma}")
    u = _coerce_rng(rng).uniform(size)
    return sigma * ndtri(u)


@dataclass(frozen=True)
class TblParams:
    """Truncated biased Laplace: Lap(mu, scale) conditioned on [0, 2*mu].

    The support upper end is fixed at ``r = 2 * mu`` so the truncation is
    symmetric about the center.
    """

    mu: float
    scale: float

    def __post_init__(self):
        if self.mu <= 0 or self.scale <= 0:
            raise ValueError("TBL center and scale must be positive")

    @property
    def r(self) -> float:
        return 2.0 * self.mu

    def untruncated_cdf_at_zero(self) -> float:
        return 0.5 * math.exp(-self.mu / self.scale)

    def untruncated_cdf_at_r(self) -> float:
        return 1.0 - 0.5 * math.exp(-(self.r - self.mu) / self.scale)


def sample_tbl(params: TblParams, rng: RngStream | int, size: int | None = None):
    """Draw from the TBL distribution via the inverse of the truncated CDF.

    The uniform is rescaled onto the untruncated CDF's value range over
    [0, r] and the branch of the Laplace inverse is chosen against that
    rescaled value, not against the raw uniform.
    """
    u = _coerce_rng(rng).uniform(size)
    f0 = params.untruncated_cdf_at_zero()
    fr = params.untruncated_cdf_at_r()
    up = f0 + u * (fr - f0)
    low = params.mu + params.scale * np.log(2.0 * up)
    high = params.mu - params.scale * np.log(2.0 * (1.0 - up))
    z = np.where(up <= 0.5, low, high)
    return np.clip(z, 0.0, params.r) if size is not None else float(min(max(z, 0.0), params.r))


def tbl_cdf(z, params: TblParams):
    """Analytic CDF of the TBL distribution on its support [0, r]."""
    z = np.asarray(z, dtype=np.float64)
    zc = np.clip(z, 0.0, params.r)
    f = np.where(
        zc <= params.mu,
        0.5 * np.exp((zc - params.mu) / params.scale),
        1.0 - 0.5 * np.exp(-(zc - params.mu) / params.scale),
    )
    f0 = params.untruncated_cdf_at_zero()
    fr = params.untruncated_cdf_at_r()
    out = (f - f0) / (fr - f0)
    return np.where(z < 0.0, 0.0, np.where(z > params.r, 1.0, out))


def tbl_delta0(mu: float, eps0: float) -> float:
    """Smallest delta0 for which TBL(mu, 1/eps0) noise on a sensitivity-1
    statistic is (eps0, delta0) differentially private.

    delta0 = 0.5 * exp(-(mu - 1) * eps0) * (1 - exp(-mu * eps0)).
    """
    if mu < 1:
        raise ValueError(f"TBL center must be >= 1 for the calibration, got {mu}")
    if eps0 <= 0:
        raise ValueError(f"eps0 must be positive, got {eps0}")
    return 0.5 * math.exp(-(mu - 1.0) * eps0) * (1.0 - math.exp(-mu * eps0))
