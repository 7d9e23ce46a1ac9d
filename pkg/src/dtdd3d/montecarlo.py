"""Monte Carlo campaigns and coverage curves.

Drop ``i`` of a campaign draws all its randomness from its own Philox stream,
keyed by ``(seed, i)``. Drops are evaluated in fixed-size chunks whose
boundaries depend only on the drop count, so results do not depend on how
many worker processes share the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .antenna import BeamMode
from .channel import RadioConfig, linear_to_db
from .geometry import SECTOR_AZIMUTHS, NetworkLayout, build_lattice, sample_interferer_offsets, sample_serving_offset
from .scenario import (
    Direction,
    TddConfig,
    TddRealization,
    dl_isr,
    draw_realization,
    serving_shadow,
    sinr_dl,
    sinr_ul,
    ul_isr,
)

__all__ = [
    "CampaignSpec",
    "CampaignResult",
    "CoverageCurve",
    "drop_rng",
    "run_campaign",
    "coverage_curve",
    "default_gamma_grid",
    "CHUNK",
    "MeanCheck",
    "compare_mc_analytic",
    "mean_and_stderr",
    "evaluate_drops",
]

CHUNK = 256


def default_gamma_grid() -> np.ndarray:
    return np.round(np.arange(-40.0, 40.0 + 1e-9, 0.5), 10)


@dataclass(frozen=True)
class CampaignSpec:
    """Everything that determines a campaign's output.

    ``z0`` pins the tagged user (complex km); otherwise it is redrawn each
    drop, area-uniformly over the serving sector (``serving_law="area"``) or
    under the interferer radial law (``"radial"``).
    """

    n_drops: int = 20000
    seed: int = 1
    tdd: TddConfig = field(default_factory=TddConfig)
    mode: BeamMode = field(default_factory=BeamMode)
    cfg: RadioConfig = field(default_factory=RadioConfig)
    layout: NetworkLayout = field(default_factory=lambda: build_lattice(0.75, 5))
    direction: Direction = Direction.DL
    z0: complex | None = None
    serving_law: str = "area"

    def __post_init__(self):
        if int(self.n_drops) != self.n_drops or self.n_drops < 1:
            raise ValueError(f"n_drops must be a positive integer, got {self.n_drops}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if isinstance(self.direction, str):
            object.__setattr__(self, "direction", Direction(self.direction))
        if self.serving_law not in ("area", "radial"):
            raise ValueError(f"serving_law must be 'area' or 'radial', got {self.serving_law!r}")

    def with_(self, **changes) -> "CampaignSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class CampaignResult:
    """Per-drop samples, indexed by drop."""

    sinr: np.ndarray
    x: np.ndarray
    isr_bs: np.ndarray
    isr_mobile: np.ndarray
    serving_gain: np.ndarray

    @property
    def sinr_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return linear_to_db(self.sinr)

    def __len__(self) -> int:
        return len(self.sinr)


@dataclass(frozen=True)
class CoverageCurve:
    gamma_grid: np.ndarray
    theta: np.ndarray
    stderr: np.ndarray
    n: int


def drop_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream of drop ``index``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


def _draw_z0(rng: np.random.Generator, spec: CampaignSpec) -> complex:
    delta = spec.layout.delta
    azimuth = float(SECTOR_AZIMUTHS[0])
    if spec.serving_law == "area":
        return sample_serving_offset(rng, azimuth, delta)
    while True:
        offset, r = sample_interferer_offsets(rng.random(), rng.random(), delta)
        if r > 0:
            return complex(r * np.exp(1j * (azimuth + offset)))


def _run_chunk(spec: CampaignSpec, start: int, stop: int):
    reals = []
    z0 = np.empty(stop - start, dtype=complex)
    for j, i in enumerate(range(start, stop)):
        rng = drop_rng(spec.seed, i)
        reals.append(draw_realization(spec.layout, spec.tdd, spec.direction, rng))
        z0[j] = spec.z0 if spec.z0 is not None else _draw_z0(rng, spec)
    real = TddRealization.stack(reals)
    return evaluate_drops(spec, real, z0)


def evaluate_drops(spec: CampaignSpec, real: TddRealization, z0: np.ndarray):
    """ISR and SINR of a stack of realizations."""
    cfg = spec.cfg
    delta = spec.layout.delta
    x = np.abs(z0) / delta
    chi = serving_shadow(real, cfg)
    if spec.direction is Direction.DL:
        isr = dl_isr(z0, real, spec.mode, cfg)
        sinr = sinr_dl(isr, x, chi, cfg, delta)
    else:
        isr = ul_isr(z0, real, spec.mode, cfg)
        sinr = sinr_ul(isr, x, chi, cfg, delta)
    n = len(z0)
    return (
        np.asarray(sinr, dtype=float).reshape(n),
        x,
        np.asarray(isr.bs_component, dtype=float).reshape(n),
        np.asarray(isr.mobile_component, dtype=float).reshape(n),
        np.broadcast_to(np.asarray(isr.serving_gain, dtype=float), (n,)).copy(),
    )


def _chunks(n: int):
    return [(a, min(a + CHUNK, n)) for a in range(0, n, CHUNK)]


def run_campaign(spec: CampaignSpec, workers: int = 1) -> CampaignResult:
    """Run ``spec.n_drops`` independent drops.

    The output is identical for any ``workers`` count.
    """
    chunks = _chunks(spec.n_drops)
    if workers <= 1 or len(chunks) == 1:
        parts = [_run_chunk(spec, a, b) for a, b in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, spec, a, b) for a, b in chunks]
            parts = [f.result() for f in futures]
    cols = [np.concatenate([p[k] for p in parts]) for k in range(5)]
    return CampaignResult(*cols)


def coverage_curve(samples, gamma_grid=None) -> CoverageCurve:
    """Empirical ``P(SINR > gamma)`` with binomial standard errors.

    ``samples`` are linear SINRs (or a :class:`CampaignResult`); thresholds
    are in dB.
    """
    if isinstance(samples, CampaignResult):
        samples = samples.sinr
    s = np.asarray(samples, dtype=float).ravel()
    if s.size == 0:
        raise ValueError("coverage_curve needs at least one sample")
    grid = default_gamma_grid() if gamma_grid is None else np.asarray(gamma_grid, dtype=float)
    with np.errstate(divide="ignore"):
        s_db = np.sort(linear_to_db(s))
    # Count of samples strictly above each threshold.
    above = s.size - np.searchsorted(s_db, grid, side="right")
    theta = above / s.size
    stderr = np.sqrt(theta * (1.0 - theta) / s.size)
    return CoverageCurve(grid, theta, stderr, int(s.size))


def mean_and_stderr(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return float(v.mean()), math.inf
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))


@dataclass(frozen=True)
class MeanCheck:
    """Simulated vs analytic mean of one ISR component."""

    component: str
    mc_mean: float
    mc_stderr: float
    analytic: float
    analytic_stderr: float
    literal: float

    @property
    def z_score(self) -> float:
        se = math.hypot(self.mc_stderr, self.analytic_stderr)
        diff = self.mc_mean - self.analytic
        if se == 0.0:
            return 0.0 if abs(diff) <= 1e-9 * max(1.0, abs(self.analytic)) else math.inf
        return diff / se


def compare_mc_analytic(spec: CampaignSpec, workers: int = 1, gain_samples: int = 20000) -> list[MeanCheck]:
    """Mean of each ISR component over a campaign against its expectation.

    ``spec.z0`` must be set; downlink components come from a downlink
    campaign and uplink ones from an uplink campaign, both over
    ``spec.layout`` with ``spec.tdd``.
    """
    from . import analytic

    if spec.z0 is None:
        raise ValueError("compare_mc_analytic needs a fixed z0")
    z0 = complex(spec.z0)
    cfg, mode, lay = spec.cfg, spec.mode, spec.layout
    x = abs(z0) / lay.delta
    alpha_d = spec.tdd.p_downlink
    alpha_u = spec.tdd.alpha_u
    dl = run_campaign(spec.with_(direction=Direction.DL), workers)
    ul = run_campaign(spec.with_(direction=Direction.UL), workers)

    def row(name, samples, cond, lit):
        m, se = mean_and_stderr(samples)
        return MeanCheck(name, m, se, cond.value, cond.stderr, lit.value)

    kw = dict(layout=lay, n_samples=gain_samples, seed=spec.seed)
    d_down = analytic.expected_dl_to_dl(z0, cfg, mode, alpha_d, **kw)
    d_down_lit = analytic.expected_dl_to_dl(z0, cfg, mode, alpha_d, reading="literal", **kw)
    d_up = analytic.expected_ul_to_dl(z0, cfg, mode, alpha_u, layout=lay)
    u_down = analytic.expected_dl_to_ul(x, cfg, mode, alpha_d, **kw)
    u_up = analytic.expected_ul_to_ul(x, cfg, alpha_u, layout=lay)
    u_up_lit = analytic.expected_ul_to_ul(x, cfg, alpha_u, layout=lay, reading="literal")
    return [
        row("D_down", dl.isr_bs, d_down, d_down_lit),
        row("D_up", dl.isr_mobile, d_up, d_up),
        row("U_down", ul.isr_bs, u_down, u_down),
        row("U_up", ul.isr_mobile, u_up, u_up_lit),
    ]
