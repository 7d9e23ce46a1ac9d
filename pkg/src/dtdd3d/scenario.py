"""One D-TDD time slot: direction draws, interferer placement, the four ISR
components, SINR and throughput.

All arrays carry optional leading batch axes, so the same code evaluates a
single realization or a stack of Monte Carlo drops. The serving site is
always index 0 of the layout and the tagged user ``z0`` is served by its
first sector.

ISR components are normalized by the useful received power. In downlink
that power includes the serving beam gain ``g0`` (exactly 1 under 3D
beamforming, where the serving beam points straight at ``z0``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .antenna import BeamMode, site_gain_terms
from .channel import RadioConfig, shadow_from_normal
from .geometry import SECTOR_AZIMUTHS, MobilePlacement, NetworkLayout, sample_interferer_offsets

__all__ = [
    "TddMode",
    "Direction",
    "TddConfig",
    "TddRealization",
    "IsrBreakdown",
    "draw_realization",
    "dl_isr",
    "ul_isr",
    "sinr_dl",
    "sinr_ul",
    "throughput",
    "serving_shadow",
]


class TddMode(enum.Enum):
    STATIC_DL = "static_dl"
    STATIC_UL = "static_ul"
    DYNAMIC = "dynamic"


class Direction(enum.Enum):
    DL = "dl"
    UL = "ul"


@dataclass(frozen=True)
class TddConfig:
    """Duplexing mode; ``alpha_d`` is the per-site probability of downlink."""

    mode: TddMode = TddMode.DYNAMIC
    alpha_d: float = 0.5

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", TddMode(self.mode))
        if not 0.0 <= self.alpha_d <= 1.0:
            raise ValueError(f"alpha_d must lie in [0, 1], got {self.alpha_d}")

    @property
    def p_downlink(self) -> float:
        """Probability that a non-serving site transmits in downlink."""
        if self.mode is TddMode.STATIC_DL:
            return 1.0
        if self.mode is TddMode.STATIC_UL:
            return 0.0
        return self.alpha_d

    @property
    def alpha_u(self) -> float:
        return 1.0 - self.p_downlink


@dataclass(frozen=True, eq=False)
class TddRealization:
    """Random state of one slot (or a stack of slots along leading axes).

    ``directions[..., s]`` is True when site ``s`` transmits in downlink.
    Served users of sector ``c`` of site ``s`` sit at angle
    ``SECTOR_AZIMUTHS[c] + offsets[..., s, c]`` and distance ``r[..., s, c]``.
    Shadowing is stored as standard normals; it is scaled by the configured
    deviation only when an ISR is evaluated.
    """

    sites: np.ndarray
    delta: float
    directions: np.ndarray
    offsets: np.ndarray
    r: np.ndarray
    bs_normal: np.ndarray
    mobile_normal: np.ndarray
    serving_normal: np.ndarray

    @property
    def served_positions(self) -> np.ndarray:
        return self.sites[:, None] + self.r * np.exp(1j * (SECTOR_AZIMUTHS + self.offsets))

    def with_direction(self, site: int, downlink: bool) -> "TddRealization":
        """Copy with one site's direction overridden; other draws untouched."""
        d = np.array(self.directions, copy=True)
        d[..., site] = downlink
        return TddRealization(
            self.sites, self.delta, d, self.offsets, self.r,
            self.bs_normal, self.mobile_normal, self.serving_normal,
        )

    @staticmethod
    def stack(items: list["TddRealization"]) -> "TddRealization":
        first = items[0]
        return TddRealization(
            first.sites,
            first.delta,
            np.stack([it.directions for it in items]),
            np.stack([it.offsets for it in items]),
            np.stack([it.r for it in items]),
            np.stack([it.bs_normal for it in items]),
            np.stack([it.mobile_normal for it in items]),
            np.array([it.serving_normal for it in items]),
        )


@dataclass(frozen=True)
class IsrBreakdown:
    """ISR from base stations and from mobiles; ``serving_gain`` is the
    downlink useful-beam gain the components were normalized by."""

    bs_component: np.ndarray | float
    mobile_component: np.ndarray | float
    serving_gain: np.ndarray | float = 1.0

    @property
    def total(self):
        return self.bs_component + self.mobile_component


def draw_realization(
    layout: NetworkLayout, tdd: TddConfig, serving_direction: Direction, rng: np.random.Generator
) -> TddRealization:
    """Draw one slot. The stream is consumed in a fixed order (directions,
    interferer angles, interferer radii, shadowing) so that configurations
    sharing a seed share their random numbers."""
    n = layout.n_sites
    u_dir = rng.random(n)
    u_theta = rng.random((n, 3))
    u_r = rng.random((n, 3))
    bs_normal = rng.standard_normal(n)
    mobile_normal = rng.standard_normal((n, 3))
    serving_normal = rng.standard_normal()
    directions = u_dir < tdd.p_downlink
    directions[0] = serving_direction is Direction.DL
    offsets, r = sample_interferer_offsets(u_theta, u_r, layout.delta)
    return TddRealization(
        layout.positions, layout.delta, directions, offsets, r, bs_normal, mobile_normal, serving_normal
    )


def _z0_array(z0):
    if isinstance(z0, MobilePlacement):
        return np.asarray(z0.position, dtype=complex)
    return np.asarray(z0, dtype=complex)


def dl_isr(z0, real: TddRealization, mode: BeamMode, cfg: RadioConfig) -> IsrBreakdown:
    """Downlink ISR at ``z0`` (serving site 0 in downlink).

    ``bs_component`` counts every downlink site of the lattice except the
    serving beam itself (so the two co-sector beams of the serving site are
    included, with the serving link's shadowing). ``mobile_component`` counts
    the three uplink mobiles of every other uplink site.
    """
    z0 = _z0_array(z0)
    two_b = cfg.two_b
    r0 = np.abs(z0)
    served = real.served_positions
    # The serving beam is steered at z0.
    served = np.array(np.broadcast_to(served, np.broadcast_shapes(served.shape, z0.shape + (1, 1))))
    served[..., 0, 0] = z0
    terms = site_gain_terms(z0[..., None], real.sites, served, mode, cfg.l_b)
    g0 = terms[..., 0, 0]
    cosector = terms[..., 0, 1] + terms[..., 0, 2]

    others = real.sites[1:]
    dist = np.abs(others - z0[..., None])
    chi = shadow_from_normal(real.bs_normal[..., 1:], cfg.sigma_tilde_db)
    downlink = real.directions[..., 1:]
    gain = terms[..., 1:, :].sum(axis=-1)
    bs_sum = np.sum(np.where(downlink, gain * chi * (r0[..., None] / dist) ** two_b, 0.0), axis=-1)

    mob = served[..., 1:, :]
    d_mob = np.maximum(np.abs(mob - z0[..., None, None]), cfg.d_min)
    chi_m = shadow_from_normal(real.mobile_normal[..., 1:, :], cfg.sigma_tilde_db)
    tx = real.r[..., 1:, :] ** (two_b * cfg.k_fpc)
    per_mobile = (cfg.p_star / cfg.p_dl) * tx * chi_m * (r0[..., None, None] / d_mob) ** two_b
    mob_sum = np.sum(np.where(downlink, 0.0, per_mobile.sum(axis=-1)), axis=-1)

    with np.errstate(divide="ignore", invalid="ignore"):
        bs_component = (cosector + bs_sum) / g0
        mobile_component = mob_sum / g0
    return IsrBreakdown(_unwrap(bs_component), _unwrap(mobile_component), _unwrap(g0))


def ul_isr(z0, real: TddRealization, mode: BeamMode, cfg: RadioConfig) -> IsrBreakdown:
    """Uplink ISR at the serving BS for the tagged mobile ``z0`` (serving
    site 0 in uplink).

    ``bs_component``: downlink sites' beams received at the serving BS.
    ``mobile_component``: uplink mobiles of every uplink sector except the
    tagged user's own, including the two co-sectors of the serving site.
    """
    z0 = _z0_array(z0)
    two_b = cfg.two_b
    r0 = np.abs(z0)
    useful = r0 ** (two_b * (1.0 - cfg.k_fpc))
    served = real.served_positions
    origin = np.zeros_like(z0)

    others = real.sites[1:]
    terms = site_gain_terms(origin[..., None], others, served[..., 1:, :], mode, cfg.l_b)
    gain = terms.sum(axis=-1)
    chi = shadow_from_normal(real.bs_normal[..., 1:], cfg.sigma_tilde_db)
    downlink = real.directions[..., 1:]
    bs_sum = np.sum(np.where(downlink, gain * chi * np.abs(others) ** -two_b, 0.0), axis=-1)
    bs_component = (cfg.p_dl / cfg.p_star) * bs_sum * useful

    d_mob = np.maximum(np.abs(served), cfg.d_min)
    chi_m = shadow_from_normal(real.mobile_normal, cfg.sigma_tilde_db)
    per_mobile = real.r ** (two_b * cfg.k_fpc) * chi_m * d_mob**-two_b
    uplink = ~np.asarray(real.directions, dtype=bool)
    # The serving site is uplink by construction; drop the tagged user's slot.
    mask = np.broadcast_to(uplink[..., None], per_mobile.shape).copy()
    mask[..., 0, 0] = False
    mob_sum = np.sum(np.where(mask, per_mobile, 0.0), axis=(-2, -1))
    return IsrBreakdown(_unwrap(bs_component), _unwrap(mob_sum * useful), 1.0)


def _unwrap(a):
    a = np.asarray(a)
    return a if a.ndim else float(a)


def _isr_total(isr):
    return isr.total if isinstance(isr, IsrBreakdown) else isr


def sinr_dl(isr, x, serving_shadow, cfg: RadioConfig, delta: float, serving_gain=None):
    """Downlink SINR ``1 / (eta * I + y0 * x**(2b) / g0)``.

    ``y0 = P_N a delta**(2b) / (P chi)`` with ``chi`` the serving link's
    (absolute) shadowing; ``g0`` defaults to the breakdown's serving gain.
    """
    if serving_gain is None:
        serving_gain = isr.serving_gain if isinstance(isr, IsrBreakdown) else 1.0
    y0 = cfg.p_noise * cfg.a * delta**cfg.two_b / (cfg.p_dl * np.asarray(serving_shadow))
    with np.errstate(divide="ignore"):
        noise = y0 * np.asarray(x) ** cfg.two_b / serving_gain
        out = 1.0 / (cfg.eta * _isr_total(isr) + noise)
    return _unwrap(out)


def sinr_ul(isr, x, serving_shadow, cfg: RadioConfig, delta: float):
    """Uplink SINR ``1 / (eta * I + y0' * x**(2b(1-k)))`` with
    ``y0' = P_N a delta**(2b(1-k)) / (P* G_bs chi)``."""
    e = cfg.two_b * (1.0 - cfg.k_fpc)
    y0 = cfg.p_noise * cfg.a * delta**e / (cfg.p_star * cfg.bs_gain * np.asarray(serving_shadow))
    out = 1.0 / (cfg.eta * _isr_total(isr) + y0 * np.asarray(x) ** e)
    return _unwrap(out)


def throughput(sinr, k1: float, k2: float):
    """Modified Shannon rate ``k1 * log2(1 + k2 * sinr)``."""
    if not (k1 > 0 and k2 > 0):
        raise ValueError("k1 and k2 must be positive")
    s = np.asarray(sinr, dtype=float)
    if np.any(s < 0):
        raise ValueError("sinr must be nonnegative")
    return _unwrap(k1 * np.log2(1.0 + k2 * s))


def serving_shadow(real: TddRealization, cfg: RadioConfig):
    """Absolute shadowing of the serving link (deviation ``sigma``)."""
    return shadow_from_normal(real.serving_normal, cfg.sigma_db)

