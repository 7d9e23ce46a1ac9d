"""Path loss, log-normal shadowing, fractional power control and received power.

Powers are linear mW internally; the config stores dB/dBm as printed in link
budgets. Distances are km, so ``a_db`` is the loss at 1 km.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DegenerateGeometryError, MobilePlacement

__all__ = [
    "RadioConfig",
    "ShadowRatio",
    "db_to_linear",
    "linear_to_db",
    "path_loss",
    "shadow_mean_factor",
    "shadow_from_normal",
    "sample_shadow_ratio",
    "ul_tx_power",
    "rx_power_from_bs",
    "rx_power_from_mobile",
]

_LN10_OVER_10 = math.log(10.0) / 10.0


def db_to_linear(x):
    return np.power(10.0, np.asarray(x, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class RadioConfig:
    """Physical-layer constants. Defaults are the macro-cell link budget."""

    p_dl_dbm: float = 43.0
    p_star_dbm: float = 20.0
    p_noise_dbm: float = -93.0
    a_db: float = 130.0
    two_b: float = 3.5
    k_fpc: float = 0.4
    sigma_db: float = 6.0
    l_b: float = 0.02
    g_ant_db: float = 17.5
    eta: float = 1.0
    d_min: float = 0.001
    # True when p_dl_dbm / p_star_dbm already include the BS antenna gain.
    gain_in_power: bool = False

    def __post_init__(self):
        if not self.two_b > 2.0:
            raise ValueError(f"two_b must exceed 2, got {self.two_b}")
        if not 0.0 <= self.k_fpc <= 1.0:
            raise ValueError(f"k_fpc must lie in [0, 1], got {self.k_fpc}")
        if not self.sigma_db >= 0.0:
            raise ValueError(f"sigma_db must be nonnegative, got {self.sigma_db}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if not self.l_b > 0.0:
            raise ValueError(f"l_b must be positive, got {self.l_b}")
        if not self.d_min >= 0.0:
            raise ValueError(f"d_min must be nonnegative, got {self.d_min}")

    @property
    def b(self) -> float:
        return self.two_b / 2.0

    @property
    def sigma_tilde_db(self) -> float:
        # Ratio of two independent shadowing terms.
        return math.sqrt(2.0) * self.sigma_db

    @property
    def bs_gain(self) -> float:
        return 1.0 if self.gain_in_power else 10.0 ** (self.g_ant_db / 10.0)

    @property
    def p_dl(self) -> float:
        """BS EIRP at beam peak, mW."""
        return 10.0 ** (self.p_dl_dbm / 10.0) * self.bs_gain

    @property
    def p_star(self) -> float:
        return 10.0 ** (self.p_star_dbm / 10.0)

    @property
    def p_noise(self) -> float:
        return 10.0 ** (self.p_noise_dbm / 10.0)

    @property
    def a(self) -> float:
        return 10.0 ** (self.a_db / 10.0)


@dataclass(frozen=True)
class ShadowRatio:
    value: float
    sigma_tilde_db: float


def path_loss(d, cfg: RadioConfig):
    """``a * d**(2b)``."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("path_loss needs a positive distance")
    out = cfg.a * np.power(d, cfg.two_b)
    return out if out.ndim else float(out)


def shadow_mean_factor(sigma_db: float) -> float:
    """Mean of ``10**(Y/10)`` for ``Y ~ N(0, sigma_db**2)``."""
    return math.exp(math.log(10.0) ** 2 * sigma_db**2 / 200.0)


def shadow_from_normal(z, sigma_db: float):
    """Log-normal factor from standard normal draws ``z``."""
    return np.exp(_LN10_OVER_10 * sigma_db * np.asarray(z, dtype=float))


def sample_shadow_ratio(cfg: RadioConfig, rng: np.random.Generator, size=None):
    """Shadowing ratio between an interfering and the serving link.

    Median 1, log-std ``sigma_tilde = sqrt(2) * sigma`` (dB). Returns a
    :class:`ShadowRatio` for scalar draws and a plain array when ``size`` is
    given.
    """
    v = shadow_from_normal(rng.standard_normal(size), cfg.sigma_tilde_db)
    if size is None:
        return ShadowRatio(float(v), cfg.sigma_tilde_db)
    return v


def ul_tx_power(d_serving, cfg: RadioConfig):
    """Fractional power control: ``P* * d**(2b k)`` in mW."""
    out = cfg.p_star * np.power(np.asarray(d_serving, dtype=float), cfg.two_b * cfg.k_fpc)
    return out if np.ndim(out) else float(out)


def _value(shadow):
    return shadow.value if isinstance(shadow, ShadowRatio) else shadow


def rx_power_from_bs(observer, site, gain, shadow, cfg: RadioConfig):
    """Power received at ``observer`` from BS ``site`` with beam gain ``gain``."""
    d = np.abs(np.asarray(observer, dtype=complex) - np.asarray(site, dtype=complex))
    if np.any(d == 0):
        raise DegenerateGeometryError("observer coincides with the BS")
    out = cfg.p_dl * np.asarray(gain) * _value(shadow) / path_loss(d, cfg)
    return out if np.ndim(out) else float(out)


def rx_power_from_mobile(observer, interferer: MobilePlacement, shadow, cfg: RadioConfig):
    """Power received at ``observer`` from an uplink mobile.

    The mobile transmits under fractional power control towards its own BS;
    the link distance is clamped below at ``cfg.d_min``.
    """
    return _rx_from_mobile(observer, interferer.position, interferer.r, shadow, cfg)


def _rx_from_mobile(observer, position, r_serving, shadow, cfg: RadioConfig):
    d = np.abs(np.asarray(observer, dtype=complex) - np.asarray(position, dtype=complex))
    d = np.maximum(d, cfg.d_min)
    out = ul_tx_power(r_serving, cfg) * _value(shadow) / (cfg.a * np.power(d, cfg.two_b))
    return out if np.ndim(out) else float(out)
