"""Fading and MIMO-precoding gain models.

Zero-forcing MU-MIMO leaves the served user a Gamma(N_T - M + 1, 1) effective
channel gain and hands each interfering base station a Gamma(M, 1) aggregate
gain.  Satellite links fade Nakagami-m, i.e. the power gain is Gamma(m, 1/m)
with unit mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics.special import upper_incomplete_gamma_reg

_INTEGER_EPS = 1e-9


@dataclass(frozen=True)
class MimoConfig:
    antennas: int = 32
    users_per_cell: int = 16

    def __post_init__(self):
        if self.antennas < 1 or self.users_per_cell < 1:
            raise ValueError("antenna and user counts must be positive integers")
        if self.users_per_cell > self.antennas:
            raise ValueError(
                f"zero-forcing needs M <= N_T, got M={self.users_per_cell} > "
                f"N_T={self.antennas}"
            )

    @property
    def serving_shape(self) -> int:
        """Gamma shape of the served user's equivalent gain, N_T - M + 1."""
        return self.antennas - self.users_per_cell + 1

    @property
    def interferer_shape(self) -> int:
        """Gamma shape of one interfering BS's aggregate gain, M."""
        return self.users_per_cell


@dataclass(frozen=True)
class SatelliteFading:
    nakagami_m: float = 2.0

    def __post_init__(self):
        if self.nakagami_m < 0.5:
            raise ValueError("Nakagami m must be >= 0.5")

    @property
    def is_integer(self) -> bool:
        return abs(self.nakagami_m - round(self.nakagami_m)) < _INTEGER_EPS


def serving_gain_ccdf_terrestrial(mimo: MimoConfig, x: float) -> float:
    """P[serving ZF gain >= x]: Gamma(m_o, 1) tail via the Poisson sum.

    Written as its own accumulation loop, independent of the incomplete-gamma
    routine it must agree with.
    """
    if x < 0.0:
        raise ValueError("gain threshold must be non-negative")
    if x == 0.0:
        return 1.0
    if x > 700.0:
        return upper_incomplete_gamma_reg(float(mimo.serving_shape), x)
    log_term = -x
    total = 0.0
    for k in range(mimo.serving_shape):
        total += math.exp(log_term)
        log_term += math.log(x) - math.log(k + 1.0)
    return min(total, 1.0)


def serving_gain_ccdf_satellite(fading: SatelliteFading, x: float) -> float:
    """P[Nakagami-m power gain >= x] = Gamma(m, m x) / Gamma(m)."""
    if x < 0.0:
        raise ValueError("gain threshold must be non-negative")
    m = fading.nakagami_m
    return upper_incomplete_gamma_reg(m, m * x)


def sample_gamma(shape: float, scale: float, rng: np.random.Generator, size=None):
    """Gamma variates off a seeded generator.

    numpy's Generator implements the Marsaglia-Tsang squeeze (with the
    standard shape<1 boost), so draws are exactly reproducible per generator
    state.
    """
    if shape <= 0.0 or scale <= 0.0:
        raise ValueError("gamma shape and scale must be positive")
    return rng.gamma(shape, scale, size=size)
