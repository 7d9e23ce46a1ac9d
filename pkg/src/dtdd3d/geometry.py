"""Tri-sectorized hexagonal lattice and user placement, in complex coordinates.

Distances are in km and angles in radians throughout. Site ``(m, n)`` sits at
``delta * (m + n * exp(i pi/3))``; sector ``c`` of every site points at
azimuth ``pi/3 * (2c - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "SECTOR_AZIMUTHS",
    "SECTOR_HALF_WIDTH",
    "SECTOR_ENVELOPE_3DB",
    "Site",
    "Sector",
    "NetworkLayout",
    "MobilePlacement",
    "DegenerateGeometryError",
    "build_lattice",
    "hex_ring_index",
    "arg_between",
    "radial_bound",
    "sample_interferer_position",
    "sample_interferer_offsets",
    "sample_serving_offset",
    "sector_polygon",
    "sample_serving_user",
]

_E60 = complex(0.5, math.sqrt(3.0) / 2.0)

SECTOR_AZIMUTHS = np.array([math.pi / 3.0, math.pi, 5.0 * math.pi / 3.0])
SECTOR_HALF_WIDTH = math.pi / 3.0
# Half-power width of the pattern that covers one hexagonal sector.
SECTOR_ENVELOPE_3DB = math.radians(65.0)


class DegenerateGeometryError(ValueError):
    """Two points that must be distinct coincide."""


@dataclass(frozen=True)
class Site:
    m: int
    n: int
    position: complex

    @property
    def is_origin(self) -> bool:
        return self.m == 0 and self.n == 0


@dataclass(frozen=True)
class Sector:
    site: Site
    c: int

    @property
    def azimuth(self) -> float:
        return math.pi / 3.0 * (2 * self.c - 1)


@dataclass(frozen=True)
class MobilePlacement:
    """A mobile located at ``site + r * exp(i theta)``."""

    sector: Sector
    r: float
    theta: float
    delta: float = field(default=1.0, compare=False)

    @property
    def position(self) -> complex:
        return self.sector.site.position + self.r * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def x(self) -> float:
        """Distance to the site normalized by the inter-site distance."""
        return self.r / self.delta


def hex_ring_index(m, n):
    """Hexagonal ring of lattice point ``(m, n)``."""
    m = np.asarray(m)
    n = np.asarray(n)
    return np.maximum(np.maximum(np.abs(m), np.abs(n)), np.abs(m + n))


@dataclass(frozen=True, eq=False)
class NetworkLayout:
    """Sites of the hexagonal lattice up to ``rings`` hexagonal rings.

    Site arrays are ordered by ring index and then by polar angle in
    ``[0, 2 pi)``, so the origin site is always index 0.
    """

    delta: float
    rings: int
    m: np.ndarray
    n: np.ndarray
    positions: np.ndarray

    @property
    def n_sites(self) -> int:
        return len(self.positions)

    @cached_property
    def sites(self) -> list[Site]:
        return [Site(int(a), int(b), complex(p)) for a, b, p in zip(self.m, self.n, self.positions)]

    @cached_property
    def sectors(self) -> list[Sector]:
        return [Sector(site, c) for site in self.sites for c in (1, 2, 3)]

    @property
    def origin(self) -> Site:
        return self.sites[0]

    @cached_property
    def ring(self) -> np.ndarray:
        return hex_ring_index(self.m, self.n)


def build_lattice(delta: float, rings: int) -> NetworkLayout:
    """All sites whose hexagonal ring index is at most ``rings``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if int(rings) != rings or rings < 0:
        raise ValueError(f"rings must be a nonnegative integer, got {rings}")
    rings = int(rings)
    span = np.arange(-rings, rings + 1)
    mm, nn = np.meshgrid(span, span, indexing="ij")
    mm = mm.ravel()
    nn = nn.ravel()
    keep = hex_ring_index(mm, nn) <= rings
    mm, nn = mm[keep], nn[keep]
    pos = delta * (mm + nn * _E60)
    ring = hex_ring_index(mm, nn)
    # Exact angle from integer coordinates avoids ties flipping across platforms.
    angle = np.mod(np.arctan2(nn * math.sqrt(3.0) / 2.0, mm + 0.5 * nn), 2.0 * math.pi)
    angle = np.where(ring == 0, 0.0, angle)
    order = np.lexsort((angle, ring))
    return NetworkLayout(
        delta=float(delta),
        rings=rings,
        m=mm[order].astype(np.int64),
        n=nn[order].astype(np.int64),
        positions=pos[order].astype(np.complex128),
    )


def arg_between(z, s):
    """Principal argument of ``z - s``, in ``(-pi, pi]``."""
    d = np.asarray(z, dtype=complex) - np.asarray(s, dtype=complex)
    if np.any(d == 0):
        raise DegenerateGeometryError("arg_between: points coincide")
    out = np.angle(d)
    # np.angle returns -pi for (-1, -0.0); fold onto +pi.
    out = np.where(out <= -math.pi, math.pi, out)
    return out if out.ndim else float(out)


def _envelope_exponent() -> float:
    return math.log(2.0) / math.log(math.cos(SECTOR_ENVELOPE_3DB / 2.0) ** 2)


def radial_bound(offset, delta: float, w_h: float | None = None):
    """Largest interferer distance ``(2 delta / 3) * U(offset)``.

    ``offset`` is the angle from the sector azimuth; ``U`` is the 65 degree
    sector envelope ``cos(offset)**(-2 w_h)``.
    """
    if w_h is None:
        w_h = _envelope_exponent()
    c = np.cos(np.asarray(offset, dtype=float))
    return (2.0 * delta / 3.0) * np.power(np.clip(c, 0.0, None), -2.0 * w_h)


def sample_interferer_offsets(u_theta, u_r, delta: float, w_h: float | None = None):
    """Map uniforms to ``(offset, r)`` under the sector radial law.

    ``offset`` is uniform on ``[-pi/3, pi/3]`` around the sector azimuth and
    ``r`` is uniform on ``[0, radial_bound(offset)]``.
    """
    offset = (2.0 * np.asarray(u_theta) - 1.0) * SECTOR_HALF_WIDTH
    r = np.asarray(u_r) * radial_bound(offset, delta, w_h)
    return offset, r


def sample_interferer_position(
    sector: Sector, rng: np.random.Generator, delta: float, w_h: float | None = None
) -> MobilePlacement:
    """Draw one mobile served by ``sector`` under the radial law."""
    offset, r = sample_interferer_offsets(rng.random(), rng.random(), delta, w_h)
    return MobilePlacement(sector, float(r), float(sector.azimuth + offset), delta)


def sector_polygon(site_position: complex, azimuth: float, delta: float) -> np.ndarray:
    """Vertices of the hexagonal cell served by one sector.

    The cell is a regular hexagon of circumradius ``delta / 3`` with one
    corner on the site, centred along the azimuth; its far corner lies at
    ``2 delta / 3``.
    """
    radius = delta / 3.0
    centre = site_position + radius * np.exp(1j * azimuth)
    return centre + radius * np.exp(1j * (azimuth + math.pi + np.arange(6) * math.pi / 3.0))


def _in_hexagon(local: np.ndarray, radius: float) -> np.ndarray:
    # Hexagon with vertices on the real axis, centred at 0.
    x = np.abs(local.real)
    y = np.abs(local.imag)
    h = math.sqrt(3.0) / 2.0 * radius
    return (y <= h) & (math.sqrt(3.0) * x + y <= math.sqrt(3.0) * radius)


def sample_serving_offset(rng: np.random.Generator, azimuth: float, delta: float) -> complex:
    """Area-uniform point of the sector cell, relative to its site."""
    radius = delta / 3.0
    h = math.sqrt(3.0) / 2.0 * radius
    rot = complex(math.cos(azimuth), math.sin(azimuth))
    while True:
        u = rng.random(2)
        local = complex((2.0 * u[0] - 1.0) * radius, (2.0 * u[1] - 1.0) * h)
        if _in_hexagon(np.array([local]), radius)[0]:
            z = (local + radius) * rot
            if z != 0:
                return z


def sample_serving_user(
    sector: Sector, rng: np.random.Generator, delta: float, law: str = "area", w_h: float | None = None
) -> MobilePlacement:
    """Draw the tagged user of ``sector``.

    ``law="area"`` samples uniformly over the sector's hexagonal cell by
    rejection; ``law="radial"`` reuses the interferer radial law.
    """
    if law == "radial":
        while True:
            p = sample_interferer_position(sector, rng, delta, w_h)
            if p.r > 0:
                return p
    if law != "area":
        raise ValueError(f"unknown serving-user law {law!r}")
    z = sample_serving_offset(rng, sector.azimuth, delta)
    return MobilePlacement(sector, abs(z), math.atan2(z.imag, z.real), delta)
