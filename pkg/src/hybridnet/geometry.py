"""Spherical constellation geometry, free-space path loss, and the contact angle.

A constellation of N_S satellites at a fixed altitude is treated as a uniform
point process on the orbital sphere; the user only sees satellites whose
Earth-centered zenith angle is below the horizon-limited maximum phi_max
(cos phi_max = R_e / (R_e + h_S)).  The contact angle is the smallest zenith
angle among visible satellites; its law is exponential in the spherical-cap
area, which is what all the closed-form association results build on.

All angles are radians; degrees only ever appear at the CLI boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0  # m/s
EARTH_RADIUS_M = 6_371_000.0  # mean Earth radius; overridable in config


def max_zenith_angle(earth_radius_m: float, altitude_m: float) -> float:
    """Largest zenith angle at which a satellite is still above the horizon.

    Equals arccos(alpha) with alpha = R_e / (R_e + h_S); the equivalent
    arccot(alpha / sqrt(1 - alpha^2)) form is proven equal in the tests.
    """
    if earth_radius_m <= 0.0 or altitude_m <= 0.0:
        raise ValueError("earth radius and altitude must be positive")
    alpha = earth_radius_m / (earth_radius_m + altitude_m)
    return math.acos(alpha)


@dataclass(frozen=True)
class ConstellationGeometry:
    """Orbital-shell geometry with the derived spherical quantities."""

    earth_radius_m: float = EARTH_RADIUS_M
    altitude_m: float = 800_000.0
    satellite_count: int = 300

    def __post_init__(self):
        if self.earth_radius_m <= 0.0 or self.altitude_m <= 0.0:
            raise ValueError("earth radius and altitude must be positive")
        # count 0 disables the satellite tier (terrestrial-only analysis)
        if self.satellite_count < 0 or self.satellite_count != int(self.satellite_count):
            raise ValueError("satellite count must be a non-negative integer")

    @property
    def orbit_radius_m(self) -> float:
        return self.earth_radius_m + self.altitude_m

    @property
    def alpha(self) -> float:
        return self.earth_radius_m / self.orbit_radius_m

    @property
    def max_zenith_rad(self) -> float:
        return max_zenith_angle(self.earth_radius_m, self.altitude_m)

    @property
    def density_per_m2(self) -> float:
        """Satellites per square meter of the orbital sphere."""
        return self.satellite_count / (4.0 * math.pi * self.orbit_radius_m**2)

    def _check_angle(self, phi: float):
        if not 0.0 <= phi <= self.max_zenith_rad + 1e-12:
            raise ValueError(
                f"zenith angle {phi!r} outside [0, {self.max_zenith_rad!r}]"
            )


def slant_distance(geom: ConstellationGeometry, phi: float) -> float:
    """User-to-satellite distance at zenith angle phi (law of cosines)."""
    geom._check_angle(phi)
    re = geom.earth_radius_m
    ro = geom.orbit_radius_m
    return math.sqrt(re * re + ro * ro - 2.0 * re * ro * math.cos(phi))


def path_loss_constant(carrier_hz: float) -> float:
    if carrier_hz <= 0.0:
        raise ValueError("carrier frequency must be positive")
    return (SPEED_OF_LIGHT / (4.0 * math.pi * carrier_hz)) ** 2


def satellite_path_loss(geom: ConstellationGeometry, phi: float, carrier_hz: float) -> float:
    """Free-space gain l_o / d(phi)^2, strictly decreasing in phi."""
    d = slant_distance(geom, phi)
    return path_loss_constant(carrier_hz) / (d * d)


def contact_angle_pdf(geom: ConstellationGeometry, phi: float) -> float:
    """Density of the smallest visible-satellite zenith angle."""
    geom._check_angle(phi)
    n = geom.satellite_count
    return 0.5 * n * math.sin(phi) * math.exp(-0.5 * n * (1.0 - math.cos(phi)))


def contact_angle_cdf(geom: ConstellationGeometry, phi: float) -> float:
    """1 - exp(-(N_S/2)(1 - cos phi)); defective at phi_max by the
    no-visible-satellite probability."""
    geom._check_angle(phi)
    return -math.expm1(-0.5 * geom.satellite_count * (1.0 - math.cos(phi)))


def boundary_distance(cfg, x: float) -> float:
    """Terrestrial distance at which the mean BS power matches the mean
    satellite power seen over slant distance x.

    Solves P_t,T r^-eta m_o = P_t,S G_main l_o / x^2 for r, i.e.
    (P_t,T m_o / (P_t,S G_main l_o))^(1/eta) * x^(2/eta).  Accepts any config
    object exposing the terrestrial/satellite sections.
    """
    if x <= 0.0:
        raise ValueError("slant distance must be positive")
    t = cfg.terrestrial
    s = cfg.satellite
    lo = path_loss_constant(s.carrier_hz)
    eta = t.path_loss_exponent
    k = (t.tx_power_w * t.mimo.serving_shape) / (s.tx_power_w * s.main_lobe_gain * lo)
    return k ** (1.0 / eta) * x ** (2.0 / eta)
