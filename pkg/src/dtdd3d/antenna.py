"""Mogensen-type horizontal/vertical patterns and the per-site beam gain.

A pattern with half-power width ``theta_3db`` is ``cos(angle)**(-2 w)`` with
``w = ln 2 / ln(cos(theta_3db / 2)**2)``. The cosine power is undefined for
``|angle| > pi/2``; there the pattern takes a back-lobe floor (zero by
default).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import SECTOR_AZIMUTHS, DegenerateGeometryError

__all__ = [
    "BeamKind",
    "BeamMode",
    "beam_exponent",
    "wrap_angle",
    "pattern_gain",
    "horizontal_gain",
    "vertical_gain",
    "steering_angles",
    "site_gain",
    "site_gain_terms",
]


class BeamKind(enum.Enum):
    SECTOR_ONLY = "sector_only"
    BEAM_2D = "beam2d"
    BEAM_3D = "beam3d"


@dataclass(frozen=True)
class BeamMode:
    """Antenna mode and pattern widths (angles in radians).

    ``SECTOR_ONLY`` uses the fixed sector pattern (65 degrees by default) at
    the fixed downtilt, ``BEAM_2D`` steers horizontally and keeps the fixed
    downtilt, ``BEAM_3D`` steers in both planes.
    """

    kind: BeamKind = BeamKind.BEAM_3D
    theta_h3db: float = math.radians(14.0)
    theta_v3db: float = math.radians(8.0)
    fixed_downtilt: float = math.radians(8.0)
    back_lobe: float = 0.0
    w_h: float = field(init=False, repr=False)
    w_v: float = field(init=False, repr=False)

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", BeamKind(self.kind))
        for name in ("theta_h3db", "theta_v3db"):
            value = getattr(self, name)
            if not 0.0 < value < math.pi:
                raise ValueError(f"{name} must lie in (0, pi), got {value}")
        if not 0.0 <= self.back_lobe <= 1.0:
            raise ValueError(f"back_lobe must lie in [0, 1], got {self.back_lobe}")
        object.__setattr__(self, "w_h", beam_exponent(self.theta_h3db))
        object.__setattr__(self, "w_v", beam_exponent(self.theta_v3db))

    @classmethod
    def sector_only(cls, **kw) -> "BeamMode":
        kw.setdefault("theta_h3db", math.radians(65.0))
        return cls(BeamKind.SECTOR_ONLY, **kw)

    @classmethod
    def beam_2d(cls, theta_h3db_deg: float = 14.0, **kw) -> "BeamMode":
        return cls(BeamKind.BEAM_2D, theta_h3db=math.radians(theta_h3db_deg), **kw)

    @classmethod
    def beam_3d(cls, theta_h3db_deg: float = 14.0, theta_v3db_deg: float = 8.0, **kw) -> "BeamMode":
        return cls(
            BeamKind.BEAM_3D,
            theta_h3db=math.radians(theta_h3db_deg),
            theta_v3db=math.radians(theta_v3db_deg),
            **kw,
        )


def beam_exponent(theta_3db: float) -> float:
    """Pattern exponent ``w`` such that the gain at ``theta_3db / 2`` is 1/2."""
    c = math.cos(theta_3db / 2.0)
    if not (0.0 < theta_3db < math.pi) or c <= 0.0:
        raise ValueError(f"beamwidth must lie in (0, pi), got {theta_3db}")
    return math.log(2.0) / math.log(c * c)


def wrap_angle(angle):
    """Wrap to ``(-pi, pi]``."""
    a = np.asarray(angle, dtype=float)
    out = math.pi - np.mod(math.pi - a, 2.0 * math.pi)
    return out if out.ndim else float(out)


def pattern_gain(angle, w: float, back_lobe: float = 0.0):
    """Linear gain ``cos(angle)**(-2 w)`` in front, ``back_lobe`` behind."""
    a = wrap_angle(angle)
    c = np.cos(a)
    front = np.abs(a) < math.pi / 2.0
    out = np.where(front, np.power(np.where(front, c, 1.0), -2.0 * w), back_lobe)
    return out if out.ndim else float(out)


def horizontal_gain(alpha, w_h: float, back_lobe: float = 0.0):
    return pattern_gain(alpha, w_h, back_lobe)


def vertical_gain(phi, w_v: float, back_lobe: float = 0.0):
    return pattern_gain(phi, w_v, back_lobe)


def steering_angles(observer, site, served, l_b: float):
    """Horizontal and vertical offsets between an observer and a beam.

    The beam of ``site`` is steered at ``served`` (complex positions). Returns
    ``(alpha, phi)`` with ``alpha = arg(observer - site) - arg(served - site)``
    wrapped to ``(-pi, pi]`` and ``phi = atan(l_b / |observer - site|) -
    atan(l_b / |served - site|)``.
    """
    observer = np.asarray(observer, dtype=complex)
    site = np.asarray(site, dtype=complex)
    served = np.asarray(served, dtype=complex)
    d_obs = observer - site
    d_srv = served - site
    if np.any(d_obs == 0):
        raise DegenerateGeometryError("observer coincides with the site")
    alpha = wrap_angle(np.angle(d_obs) - np.angle(d_srv))
    with np.errstate(divide="ignore"):
        phi = np.arctan(l_b / np.abs(d_obs)) - np.arctan(l_b / np.abs(d_srv))
    return alpha, (phi if np.ndim(phi) else float(phi))


def site_gain_terms(observer, site, served, mode: BeamMode, l_b: float):
    """Per-sector products ``H * V``; last axis indexes the three sectors.

    ``observer`` and ``site`` broadcast against ``served[..., :3]``.
    """
    observer = np.asarray(observer, dtype=complex)[..., None]
    site = np.asarray(site, dtype=complex)[..., None]
    d_obs = observer - site
    if np.any(d_obs == 0):
        raise DegenerateGeometryError("observer coincides with the site")
    dist = np.abs(d_obs)
    psi = np.angle(d_obs)
    if mode.kind is BeamKind.SECTOR_ONLY:
        h = pattern_gain(psi - SECTOR_AZIMUTHS, mode.w_h, mode.back_lobe)
        v = pattern_gain(np.arctan(l_b / dist) - mode.fixed_downtilt, mode.w_v, mode.back_lobe)
        return np.asarray(h * v)
    d_srv = np.asarray(served, dtype=complex) - site
    h = pattern_gain(psi - np.angle(d_srv), mode.w_h, mode.back_lobe)
    if mode.kind is BeamKind.BEAM_2D:
        tilt = mode.fixed_downtilt
    else:
        # A beam steered at its own site looks straight down.
        with np.errstate(divide="ignore"):
            tilt = np.arctan(l_b / np.abs(d_srv))
    v = pattern_gain(np.arctan(l_b / dist) - tilt, mode.w_v, mode.back_lobe)
    return np.asarray(h * v)


def site_gain(observer, site, served, mode: BeamMode, l_b: float):
    """Composite gain of a site seen from ``observer``: sum over its 3 sectors."""
    out = site_gain_terms(observer, site, served, mode, l_b).sum(axis=-1)
    return out if np.ndim(out) else float(out)
