"""Channel generation, beamforming and reduction to scalar gains.

A downlink distributed antenna system with N remote antenna units (RAUs)
of M antennas each serves a single user.  Per-RAU maximum ratio
transmission absorbs all channel phases, so the power allocator only
ever sees one effective scalar gain per RAU:

    gain_i = d_i**(-alpha/2) * ||h_i||

with d_i the RAU-user distance, alpha the decay exponent and h_i the
small-scale fading vector.
"""

from dataclasses import dataclass

import numpy as np


class DegenerateChannelError(ValueError):
    """Raised when a fading vector is identically zero."""


@dataclass
class ChannelRealization:
    """One draw of the physical channel.

    per_rau_fading: list of N complex vectors of length M (unit-variance
    Rayleigh entries); distances: N RAU-user distances in meters;
    large_scale[i] equals distances[i]**(-decay_exponent).
    """

    per_rau_fading: list
    distances: np.ndarray
    decay_exponent: float
    large_scale: np.ndarray

    def __post_init__(self):
        self.distances = np.asarray(self.distances, dtype=float)
        self.large_scale = np.asarray(self.large_scale, dtype=float)
        n = len(self.per_rau_fading)
        if n < 1:
            raise ValueError("need at least one RAU")
        if self.distances.shape != (n,) or self.large_scale.shape != (n,):
            raise ValueError("distances/large_scale length must match fading list")
        if np.any(self.distances <= 0):
            raise ValueError("distances must be strictly positive")
        if self.decay_exponent <= 0:
            raise ValueError("decay exponent must be positive")
        expected = self.distances ** (-self.decay_exponent)
        if not np.allclose(self.large_scale, expected, rtol=1e-12, atol=0.0):
            raise ValueError("large_scale inconsistent with distances and exponent")
        m = len(self.per_rau_fading[0])
        if m < 1 or any(len(h) != m for h in self.per_rau_fading):
            raise ValueError("all fading vectors must share a length M >= 1")

    @property
    def n_raus(self):
        return len(self.per_rau_fading)

    @property
    def m_antennas(self):
        return len(self.per_rau_fading[0])


@dataclass
class EffectiveGains:
    """Scalar gains sorted descending; order[k] is the original RAU index."""

    gains: np.ndarray
    order: np.ndarray

    def __post_init__(self):
        self.gains = np.asarray(self.gains, dtype=float)
        self.order = np.asarray(self.order, dtype=int)
        if np.any(self.gains <= 0):
            raise ValueError("effective gains must be strictly positive")
        if np.any(np.diff(self.gains) > 0):
            raise ValueError("gains must be sorted descending")
        if sorted(self.order.tolist()) != list(range(len(self.gains))):
            raise ValueError("order must be a permutation of RAU indices")


def generate_realization(n_raus, m_antennas, dist_low, dist_high, alpha, rng_seed):
    """Draw distances and Rayleigh fading for an N-RAU, M-antenna system.

    Distances are i.i.d. uniform on [dist_low, dist_high]; fading entries
    are circularly-symmetric complex Gaussian with unit variance (two
    real Gaussians of variance 1/2 each).  ``rng_seed`` may be an int, a
    SeedSequence or an existing Generator; a fixed seed reproduces the
    realization bit-for-bit.  Draw order: distances first, then the
    fading matrix row by RAU.
    """
    if n_raus < 1 or m_antennas < 1:
        raise ValueError("counts must be at least 1")
    if dist_low <= 0 or dist_high < dist_low:
        raise ValueError("need 0 < dist_low <= dist_high")
    if alpha <= 0:
        raise ValueError("decay exponent must be positive")
    rng = np.random.default_rng(rng_seed)
    distances = rng.uniform(dist_low, dist_high, size=n_raus)
    raw = rng.standard_normal(size=(n_raus, 2 * m_antennas))
    fading = [
        (raw[i, :m_antennas] + 1j * raw[i, m_antennas:]) / np.sqrt(2.0)
        for i in range(n_raus)
    ]
    return ChannelRealization(
        per_rau_fading=fading,
        distances=distances,
        decay_exponent=float(alpha),
        large_scale=distances ** (-float(alpha)),
    )


def dmrt_beamformer(fading_vector, large_scale_coeff):
    """Per-RAU maximum ratio transmission vector g/||g|| with g = h*sqrt(beta).

    The large-scale coefficient cancels in the normalization but is kept
    in the signature because the physical channel is h*sqrt(beta).
    """
    if large_scale_coeff <= 0:
        raise ValueError("large-scale coefficient must be positive")
    g = np.asarray(fading_vector, dtype=complex) * np.sqrt(large_scale_coeff)
    norm = np.linalg.norm(g)
    if norm == 0.0:
        raise DegenerateChannelError("cannot beamform on an all-zero channel")
    return g / norm


def effective_gains(real: ChannelRealization) -> EffectiveGains:
    """Reduce a realization to sorted scalar gains d**(-alpha/2)*||h||.

    Ties are broken by ascending original RAU index so the descending
    order is deterministic.
    """
    norms = np.array([np.linalg.norm(h) for h in real.per_rau_fading])
    gains = real.distances ** (-real.decay_exponent / 2.0) * norms
    order = np.lexsort((np.arange(len(gains)), -gains))
    return EffectiveGains(gains=gains[order], order=order)
