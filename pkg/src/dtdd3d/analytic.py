"""Expected ISR: zeta-series lattice sums, expected beam gains, quadrature of
the uplink interferer integrals, and brute-force lattice oracles.

Readings of the expectations
----------------------------
``reading="conditioned"`` matches what the simulator realizes: the serving
site's direction is fixed, its two co-sector beams (downlink) or mobiles
(uplink) always interfere, and only the other sites carry the ``alpha``
factor. ``reading="literal"`` evaluates the printed closed forms, where the
direction probability and the shadowing mean factor multiply every term and
``-1`` removes a unit serving term. Both coincide for static downlink without
shadowing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .antenna import BeamKind, BeamMode, pattern_gain, site_gain_terms
from .channel import RadioConfig, shadow_mean_factor
from .geometry import (
    SECTOR_AZIMUTHS,
    SECTOR_HALF_WIDTH,
    NetworkLayout,
    build_lattice,
    radial_bound,
    sample_interferer_offsets,
)
from .specfun import DEFAULT_ACCURACY, Accuracy, ln_gamma, omega

__all__ = [
    "SeriesResult",
    "Expectation",
    "ANALYTIC_RINGS",
    "lattice_series",
    "hex_lattice_tail",
    "lattice_sum_oracle",
    "ring_average_oracle",
    "origin_lattice_oracle",
    "dl_to_ul_closed_form",
    "expected_gain_2d",
    "mean_horizontal_gain",
    "expected_site_gains",
    "expected_dl_to_dl",
    "expected_ul_to_dl",
    "expected_dl_to_ul",
    "expected_ul_to_ul",
]

ANALYTIC_RINGS = 30


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    truncation_bound: float


@dataclass(frozen=True)
class Expectation:
    """An expected ISR; ``stderr`` is nonzero only when a Monte Carlo gain
    estimate entered the value."""

    value: float
    stderr: float = 0.0


# --------------------------------------------------------------------------
# zeta series


def lattice_series(x: float, b: float, acc: Accuracy = DEFAULT_ACCURACY, omega_fn=omega) -> SeriesResult:
    """Ring-averaged ``sum_{s != 0} (r / |s - z0|)**(2b)`` as a power series in
    ``x = r / delta``.

    Term ``h`` is ``6 x**(2b) (Gamma(b+h) / (Gamma(b) h!))**2 omega(b+h) x**(2h)``.
    All terms are positive; after term ``h`` the ratio of consecutive terms is
    below ``rho_h = ((b+h)/(h+1))**2 x**2`` (``omega`` decreases towards 1), so
    the remainder is at most ``t_h rho_h / (1 - rho_h)``.
    """
    if not b > 1.0:
        raise ValueError(f"lattice_series requires b > 1, got {b}")
    if not 0.0 < x <= 0.5:
        raise ValueError(f"lattice_series requires 0 < x <= 0.5, got {x}")
    lg_b = ln_gamma(b)
    log_x2 = 2.0 * math.log(x)
    total = 0.0
    for h in range(acc.max_terms):
        log_c = 2.0 * (ln_gamma(b + h) - lg_b - ln_gamma(h + 1.0))
        term = math.exp(log_c + h * log_x2) * omega_fn(b + h, acc)
        total += term
        rho = ((b + h) / (h + 1.0)) ** 2 * x * x
        if rho < 1.0:
            bound = term * rho / (1.0 - rho)
            if bound <= acc.rel_tol * total:
                prefactor = 6.0 * x ** (2.0 * b)
                return SeriesResult(prefactor * total, h + 1, prefactor * bound)
    raise ArithmeticError(f"lattice_series(x={x}, b={b}) did not reach rel_tol in {acc.max_terms} terms")


# --------------------------------------------------------------------------
# brute-force oracles


def _power_tail(q: float, n: int) -> float:
    """``sum_{i > n} i**(-q)`` by Euler-Maclaurin at ``n``, for q > 1."""
    # sum_{i>=n} f(i) = int_n^inf f + f(n)/2 - sum_k B_2k/(2k)! f^(2k-1)(n)
    f = n ** -q
    total = n ** (1.0 - q) / (q - 1.0) - 0.5 * f
    # f'(n) = -q n^(-q-1), f'''(n) = -q(q+1)(q+2) n^(-q-3), f^(5) ...
    total += q * n ** (-q - 1.0) / 12.0
    total -= q * (q + 1) * (q + 2) * n ** (-q - 3.0) / 720.0
    total += q * (q + 1) * (q + 2) * (q + 3) * (q + 4) * n ** (-q - 5.0) / 30240.0
    return total


_EDGE_NODES, _EDGE_WEIGHTS = np.polynomial.legendre.leggauss(40)


def hex_lattice_tail(p: float, rings: int, delta: float = 1.0) -> float:
    """``sum |s|**(-p)`` over lattice points beyond hexagonal ring ``rings``.

    Ring ``i`` holds ``6 i`` points on a hexagon of circumradius ``i delta``;
    by Euler-Maclaurin along each edge its sum is
    ``6 (i delta)**(-p) (I i - z/(6 i) + z(z+1)(z-4)/(360 i**3) + O(i**-5))``
    with ``z = p/2`` and ``I = int_0^1 (1 - t + t**2)**(-z) dt``.
    """
    if rings < 1:
        raise ValueError("hex_lattice_tail needs rings >= 1")
    z = p / 2.0
    t = 0.5 * (_EDGE_NODES + 1.0)
    edge_integral = 0.5 * float(np.sum(_EDGE_WEIGHTS * (1.0 - t + t * t) ** -z))
    s = edge_integral * _power_tail(p - 1.0, rings)
    s -= z / 6.0 * _power_tail(p + 1.0, rings)
    s += z * (z + 1.0) * (z - 4.0) / 360.0 * _power_tail(p + 3.0, rings)
    return 6.0 * delta**-p * s


def _ring_average_tail(r: float, b: float, rings: int, delta: float, n_terms: int = 40) -> float:
    # Angular average of |s - z|^(-2b) expanded in (r/|s|)^2, summed beyond `rings`.
    total = 0.0
    coef = 1.0
    for h in range(n_terms):
        if h:
            coef *= ((b + h - 1.0) / h) ** 2
        term = coef * r ** (2 * h) * hex_lattice_tail(2.0 * b + 2.0 * h, rings, delta)
        total += term
        if term < 1e-18 * total:
            break
    return total


def lattice_sum_oracle(z0: complex, two_b: float, delta: float = 1.0, rings: int = 50, weight=None) -> float:
    """Brute-force ``sum_{s != 0} w(s) (|z0| / |s - z0|)**(2b)`` with a tail.

    Sites up to ``rings`` are summed directly; beyond, the ring-averaged
    expansion of ``|s - z0|**(-2b)`` is summed with :func:`hex_lattice_tail`
    (``w`` is taken as 1 in the tail). The neglected anisotropic tail part is
    of relative order ``(|z0| / (rings delta))**6`` of the tail.
    """
    if rings < 30:
        raise ValueError("lattice_sum_oracle needs rings >= 30")
    z0 = complex(z0)
    r = abs(z0)
    if r == 0.0:
        return 0.0
    lay = build_lattice(delta, rings)
    s = lay.positions[1:]
    terms = (r / np.abs(s - z0)) ** two_b
    if weight is not None:
        terms = terms * np.asarray(weight(s), dtype=float)
    direct = math.fsum(terms)
    return direct + r**two_b * _ring_average_tail(r, two_b / 2.0, rings, delta)


def ring_average_oracle(x: float, two_b: float, rings: int = 50, n_angles: int = 24) -> float:
    """:func:`lattice_sum_oracle` averaged over the circle ``|z0| = x delta``.

    The summand is smooth and ``pi/3``-periodic in the angle, so the
    trapezoid rule on one period converges geometrically.
    """
    angles = (np.arange(n_angles) + 0.5) * (math.pi / 3.0) / n_angles
    vals = [lattice_sum_oracle(x * complex(math.cos(a), math.sin(a)), two_b, 1.0, rings) for a in angles]
    return math.fsum(vals) / n_angles


def origin_lattice_oracle(x: float, two_b: float, k: float, delta: float = 1.0, rings: int = 50) -> float:
    """Brute-force ``sum_{s != 0} |s|**(-2b) r**(2b(1-k))`` with ``r = x delta``."""
    lay = build_lattice(delta, rings)
    direct = math.fsum(np.abs(lay.positions[1:]) ** -two_b)
    total = direct + hex_lattice_tail(two_b, rings, delta)
    return total * (x * delta) ** (two_b * (1.0 - k))


def dl_to_ul_closed_form(x: float, b: float, k: float, delta: float = 1.0, omega_fn=omega) -> float:
    """``sum_{s != 0} |s|**(-2b) r**(2b(1-k)) = 6 omega(b) delta**(-2bk) x**(2b(1-k))``."""
    return 6.0 * omega_fn(b) * delta ** (-2.0 * b * k) * x ** (2.0 * b * (1.0 - k))


# --------------------------------------------------------------------------
# expected gains


def expected_gain_2d(phi, w_h: float, eta: float = 1.0):
    """``3 eta V(phi) Gamma(1/2 - w_h) / (sqrt(pi) Gamma(1 - w_h))``.

    ``phi`` is passed as the vertical gain ``V(phi)`` already evaluated.
    The formula equals three times the circular mean of the two-sided
    pattern ``|cos a|**(-2 w_h)``; with a zero back lobe the expectation is
    half of it (see :func:`mean_horizontal_gain`).
    """
    if not w_h < 0.5:
        raise ValueError(f"expected_gain_2d requires w_h < 1/2, got {w_h}")
    ratio = math.exp(ln_gamma(0.5 - w_h) - ln_gamma(1.0 - w_h))
    return 3.0 * eta * np.asarray(phi) * ratio / math.sqrt(math.pi)


def mean_horizontal_gain(w_h: float, back_lobe: float = 0.0) -> float:
    """Circular mean of the clamped pattern: ``(1/2pi) int_{-pi}^{pi} H``."""
    front = math.exp(ln_gamma(0.5 - w_h) - ln_gamma(1.0 - w_h)) / (2.0 * math.sqrt(math.pi))
    return front + 0.5 * back_lobe


def _arc_mean_gain(psi: float, azimuth: float, w: float, back_lobe: float) -> float:
    """Mean of ``H(psi - theta)`` for ``theta`` uniform on a sector arc."""
    lo, hi = azimuth - SECTOR_HALF_WIDTH, azimuth + SECTOR_HALF_WIDTH
    # Split at the pattern's peak and at its cutoffs so quad sees smooth pieces.
    cuts = sorted({lo, hi, *(c for c in _unwrapped_breaks(psi, lo, hi))})
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, _ = integrate.quad(lambda t: pattern_gain(psi - t, w, back_lobe), a, b, epsabs=0.0, epsrel=1e-12, limit=200)
        total += val
    return total / (hi - lo)


def _unwrapped_breaks(psi, lo, hi):
    for base in (psi, psi + math.pi / 2, psi - math.pi / 2):
        for k in range(-2, 3):
            t = base + 2.0 * math.pi * k
            if lo < t < hi:
                yield t


def _served_samples(n: int, n_sites: int, delta: float, rng: np.random.Generator):
    offsets, r = sample_interferer_offsets(rng.random((n, n_sites, 3)), rng.random((n, n_sites, 3)), delta)
    return offsets, r


def expected_site_gains(
    observer: complex,
    positions: np.ndarray,
    mode: BeamMode,
    cfg: RadioConfig,
    delta: float,
    weights: np.ndarray | None = None,
    n_samples: int = 4000,
    seed: int = 0,
):
    """Expected composite gain ``E[G_s(observer)]`` of sites at ``positions``
    whose beams are steered at random served users.

    Returns ``(gains, weighted_mean, weighted_stderr)`` where the weighted
    quantities refer to ``sum_s weights[s] G_s``. Sector-only and 2D modes are
    exact (zero stderr); 3D uses ``n_samples`` drops of served-user triples.
    """
    positions = np.asarray(positions, dtype=complex)
    w = np.ones(len(positions)) if weights is None else np.asarray(weights, dtype=float)
    if mode.kind is BeamKind.SECTOR_ONLY:
        g = site_gain_terms(observer, positions, np.zeros((len(positions), 3)), mode, cfg.l_b).sum(axis=-1)
        return g, float(np.dot(w, g)), 0.0
    dist = np.abs(positions - observer)
    if mode.kind is BeamKind.BEAM_2D:
        v = pattern_gain(np.arctan(cfg.l_b / dist) - mode.fixed_downtilt, mode.w_v, mode.back_lobe)
        g = 3.0 * mean_horizontal_gain(mode.w_h, mode.back_lobe) * v
        return g, float(np.dot(w, g)), 0.0
    rng = np.random.default_rng(seed)
    chunk = max(1, min(n_samples, 2_000_000 // max(1, 3 * len(positions))))
    gain_sum = np.zeros(len(positions))
    totals = []
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        offsets, r = _served_samples(m, len(positions), delta, rng)
        served = positions[:, None] + r * np.exp(1j * (SECTOR_AZIMUTHS + offsets))
        g = site_gain_terms(observer, positions, served, mode, cfg.l_b).sum(axis=-1)
        gain_sum += g.sum(axis=0)
        totals.append(g @ w)
        done += m
    totals = np.concatenate(totals)
    return gain_sum / n_samples, float(totals.mean()), float(totals.std(ddof=1) / math.sqrt(n_samples))


def _serving_site_gains(z0: complex, mode: BeamMode, cfg: RadioConfig, delta: float, n_samples: int, seed: int):
    """Serving beam gain ``g0`` and expected co-sector gain (mean, stderr) at z0."""
    g0 = float(site_gain_terms(z0, 0j, np.array([z0, 0, 0]), mode, cfg.l_b)[0])
    psi = math.atan2(z0.imag, z0.real)
    dist = abs(z0)
    if mode.kind is BeamKind.SECTOR_ONLY:
        terms = site_gain_terms(z0, 0j, np.zeros(3), mode, cfg.l_b)
        return g0, float(terms[1] + terms[2]), 0.0
    if mode.kind is BeamKind.BEAM_2D:
        v = float(pattern_gain(math.atan(cfg.l_b / dist) - mode.fixed_downtilt, mode.w_v, mode.back_lobe))
        h = sum(_arc_mean_gain(psi, SECTOR_AZIMUTHS[c], mode.w_h, mode.back_lobe) for c in (1, 2))
        return g0, h * v, 0.0
    rng = np.random.default_rng(seed)
    offsets, r = _served_samples(n_samples, 1, delta, rng)
    served = r[:, 0, :] * np.exp(1j * (SECTOR_AZIMUTHS + offsets[:, 0, :]))
    served[:, 0] = z0
    terms = site_gain_terms(np.full(n_samples, z0), 0j, served, mode, cfg.l_b)
    co = terms[:, 1] + terms[:, 2]
    return g0, float(co.mean()), float(co.std(ddof=1) / math.sqrt(n_samples))


def _far_field_gain(mode: BeamMode, cfg: RadioConfig, delta: float, n_samples: int, seed: int) -> float:
    # Direction-averaged E[G] for a site at infinite distance.
    mean_h = mean_horizontal_gain(mode.w_h, mode.back_lobe)
    if mode.kind is not BeamKind.BEAM_3D:
        return 3.0 * mean_h * float(pattern_gain(-mode.fixed_downtilt, mode.w_v, mode.back_lobe))
    rng = np.random.default_rng(seed)
    _, r = _served_samples(n_samples, 1, delta, rng)
    with np.errstate(divide="ignore"):
        v = pattern_gain(-np.arctan(cfg.l_b / r), mode.w_v, mode.back_lobe)
    return 3.0 * mean_h * float(np.mean(v))


def _layout_or_default(layout, delta, rings):
    return layout if layout is not None else build_lattice(delta, rings)


# --------------------------------------------------------------------------
# expected ISR components


def expected_dl_to_dl(
    z0: complex,
    cfg: RadioConfig,
    mode: BeamMode,
    alpha_d: float,
    delta: float = 0.75,
    layout: NetworkLayout | None = None,
    reading: str = "conditioned",
    acc: Accuracy = DEFAULT_ACCURACY,
    n_samples: int = 4000,
    seed: int = 0,
) -> Expectation:
    """Expected downlink-to-downlink ISR at a fixed ``z0``.

    With ``layout`` the lattice sum runs over that truncated layout (as in a
    simulation); otherwise over :data:`ANALYTIC_RINGS` rings plus the far-field
    tail, which uses the direction-averaged gain.
    """
    z0 = complex(z0)
    if layout is not None:
        delta = layout.delta
    r = abs(z0)
    lay = _layout_or_default(layout, delta, ANALYTIC_RINGS)
    others = lay.positions[1:]
    weights = (r / np.abs(others - z0)) ** cfg.two_b
    _, lattice, lattice_se = expected_site_gains(z0, others, mode, cfg, delta, weights, n_samples, seed)
    if layout is None:
        tail = r**cfg.two_b * _ring_average_tail(r, cfg.b, ANALYTIC_RINGS, delta)
        lattice += _far_field_gain(mode, cfg, delta, n_samples, seed) * tail
    g0, co, co_se = _serving_site_gains(z0, mode, cfg, delta, n_samples, seed + 1)
    mf = shadow_mean_factor(cfg.sigma_tilde_db)
    if reading == "conditioned":
        value = (co + alpha_d * mf * lattice) / g0
        se = math.hypot(co_se, alpha_d * mf * lattice_se) / g0
    elif reading == "literal":
        value = -1.0 + alpha_d * mf * (g0 + co + lattice) / g0
        se = alpha_d * mf * math.hypot(co_se, lattice_se) / g0
    else:
        raise ValueError(f"unknown reading {reading!r}")
    return Expectation(value, se)


_PHI_NODES, _PHI_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _radial_rule(p: float, n: int = 40):
    """Gauss-Jacobi rule for ``int_0^1 t**p f(t) dt``; absorbs the power
    control factor's endpoint singularity."""
    x, w = special.roots_jacobi(n, 0.0, p)
    return 0.5 * (x + 1.0), w / 2.0 ** (p + 1.0)


def _mobile_integrals(observer: complex, positions: np.ndarray, cfg: RadioConfig, delta: float, epsrel: float):
    """``E[r_sc**(2bk) / max(|z_sc - observer|, d_min)**(2b)]`` for every site in
    ``positions`` and every sector (shape ``(S, 3)``), with the served user
    under the sector radial law."""
    p = cfg.two_b * cfg.k_fpc
    q = cfg.two_b
    positions = np.asarray(positions, dtype=complex)
    out = np.empty((len(positions), 3))
    reach = 2.0 * delta / 3.0
    dist = np.abs(positions - observer)
    near = dist < 1.5 * reach + 4.0 * cfg.d_min
    far_idx = np.nonzero(~near)[0]
    if far_idx.size:
        # Smooth integrand: tensor Gauss-Legendre over (offset, t).
        phi = SECTOR_HALF_WIDTH * _PHI_NODES
        wphi = SECTOR_HALF_WIDTH * _PHI_WEIGHTS / (2.0 * SECTOR_HALF_WIDTH)
        bound = radial_bound(phi, delta)
        t_nodes, t_weights = _radial_rule(p)
        x = bound[:, None] * t_nodes[None, :]
        for c in range(3):
            unit = np.exp(1j * (SECTOR_AZIMUTHS[c] + phi))
            z = positions[far_idx, None, None] + x[None] * unit[None, :, None]
            d = np.maximum(np.abs(z - observer), cfg.d_min)
            # x**p = bound**p * t**p; the t**p part lives in the weights.
            f = (bound**p)[None, :, None] * d**-q
            out[far_idx, c] = np.einsum("sij,i,j->s", f, wphi, t_weights)
    for s in np.nonzero(near)[0]:
        for c in range(3):
            out[s, c] = _mobile_integral_adaptive(observer, positions[s], c, cfg, delta, epsrel)
    return out


def _radial_clamped(bound: float, p: float, q: float, d_min: float) -> float:
    # (1/B) int_0^B x^p max(x, d_min)^(-q) dx
    if bound <= d_min:
        return d_min**-q * bound**p / (p + 1.0)
    e = p - q + 1.0
    inner = d_min ** (p + 1.0 - q) / (p + 1.0) if d_min > 0 else 0.0
    if d_min == 0.0 and e <= 0.0:
        return math.inf
    if abs(e) < 1e-12:
        outer = math.log(bound / d_min)
    else:
        outer = (bound**e - d_min**e) / e
    return (inner + outer) / bound


def _mobile_integral_adaptive(observer, site, c, cfg, delta, epsrel):
    p = cfg.two_b * cfg.k_fpc
    q = cfg.two_b
    az = SECTOR_AZIMUTHS[c]
    if abs(site - observer) == 0.0:
        # Observer at the site: the integrand is radial only.
        def outer(phi):
            return _radial_clamped(float(radial_bound(phi, delta)), p, q, cfg.d_min)
    else:

        def outer(phi):
            bound = float(radial_bound(phi, delta))
            unit = complex(math.cos(az + phi), math.sin(az + phi))

            def f(t):
                x = bound * t
                d = max(abs(site + x * unit - observer), cfg.d_min)
                return x**p * d**-q

            # Closest approach of the ray to the observer, as a breakpoint.
            rel = (observer - site) / unit
            t_star = min(max(rel.real / bound, 0.0), 1.0) if bound > 0 else 0.0
            pts = [t_star] if 0.0 < t_star < 1.0 else None
            val, _ = integrate.quad(f, 0.0, 1.0, points=pts, epsabs=0.0, epsrel=epsrel, limit=200)
            return val

    val, _ = integrate.quad(outer, -SECTOR_HALF_WIDTH, SECTOR_HALF_WIDTH, epsabs=0.0, epsrel=epsrel, limit=200)
    return val / (2.0 * SECTOR_HALF_WIDTH)


def expected_ul_to_dl(
    z0: complex,
    cfg: RadioConfig,
    mode: BeamMode,
    alpha_u: float,
    delta: float = 0.75,
    layout: NetworkLayout | None = None,
    epsrel: float = 1e-8,
) -> Expectation:
    """Expected uplink-to-downlink ISR at a fixed ``z0``.

    Averages the three uplink mobiles of every other site over the sector
    radial law (angle uniform on the arc, distance uniform up to the
    envelope), normalized by the serving downlink power (beam gain ``g0``).
    """
    z0 = complex(z0)
    if layout is not None:
        delta = layout.delta
    if alpha_u == 0.0 or cfg.p_star == 0.0:
        return Expectation(0.0)
    lay = _layout_or_default(layout, delta, ANALYTIC_RINGS)
    r = abs(z0)
    per = _mobile_integrals(z0, lay.positions[1:], cfg, delta, epsrel).sum()
    if layout is None:
        per += _far_mobile_power(cfg, delta) * _ring_average_tail(r, cfg.b, ANALYTIC_RINGS, delta)
    g0 = float(site_gain_terms(z0, 0j, np.array([z0, 0, 0]), mode, cfg.l_b)[0])
    mf = shadow_mean_factor(cfg.sigma_tilde_db)
    return Expectation(alpha_u * mf * (cfg.p_star / cfg.p_dl) * r**cfg.two_b * per / g0)


def _far_mobile_power(cfg: RadioConfig, delta: float) -> float:
    # sum_c E[r_sc^(2bk)] for a site seen from far away.
    p = cfg.two_b * cfg.k_fpc
    phi = SECTOR_HALF_WIDTH * _PHI_NODES
    wphi = _PHI_WEIGHTS / 2.0
    bound = radial_bound(phi, delta)
    return 3.0 * float(np.sum(wphi * bound**p / (p + 1.0)))


def expected_dl_to_ul(
    x: float,
    cfg: RadioConfig,
    mode: BeamMode,
    alpha_d: float,
    delta: float = 0.75,
    layout: NetworkLayout | None = None,
    acc: Accuracy = DEFAULT_ACCURACY,
    n_samples: int = 4000,
    seed: int = 0,
    omega_fn=omega,
) -> Expectation:
    """Expected downlink-to-uplink ISR for a tagged user at ``x = r / delta``.

    ``(P / P*) alpha_d mf sum_s E[G_s(s0)] |s|**(-2b) r**(2b(1-k))``. Without a
    layout, sites within :data:`ANALYTIC_RINGS` are summed with their own gain
    and the rest of the lattice comes from the closed form
    ``6 omega(b) delta**(-2b)`` at the far-field gain.
    """
    if layout is not None:
        delta = layout.delta
    lay = _layout_or_default(layout, delta, ANALYTIC_RINGS)
    others = lay.positions[1:]
    weights = np.abs(others) ** -cfg.two_b
    _, lattice, se = expected_site_gains(0j, others, mode, cfg, delta, weights, n_samples, seed)
    if layout is None:
        rest = 6.0 * omega_fn(cfg.b, acc) * delta**-cfg.two_b - math.fsum(weights)
        lattice += _far_field_gain(mode, cfg, delta, n_samples, seed) * rest
    scale = (cfg.p_dl / cfg.p_star) * alpha_d * shadow_mean_factor(cfg.sigma_tilde_db)
    scale *= (x * delta) ** (cfg.two_b * (1.0 - cfg.k_fpc))
    return Expectation(scale * lattice, scale * se)


def expected_ul_to_ul(
    x: float,
    cfg: RadioConfig,
    alpha_u: float,
    delta: float = 0.75,
    layout: NetworkLayout | None = None,
    reading: str = "conditioned",
    epsrel: float = 1e-8,
) -> Expectation:
    """Expected uplink-to-uplink ISR at the serving BS for a tagged user at
    ``x = r / delta``.

    Every mobile-to-BS distance is clamped below at ``cfg.d_min``: without the
    clamp the serving site's co-sector term diverges whenever
    ``2b (1 - k) >= 1``.
    """
    if layout is not None:
        delta = layout.delta
    lay = _layout_or_default(layout, delta, ANALYTIC_RINGS)
    per = _mobile_integrals(0j, lay.positions, cfg, delta, epsrel)
    lattice = per[1:].sum()
    if layout is None:
        lattice += _far_mobile_power(cfg, delta) * hex_lattice_tail(cfg.two_b, ANALYTIC_RINGS, delta)
    mf = shadow_mean_factor(cfg.sigma_tilde_db)
    useful = (x * delta) ** (cfg.two_b * (1.0 - cfg.k_fpc))
    if reading == "conditioned":
        value = mf * useful * (per[0, 1] + per[0, 2] + alpha_u * lattice)
    elif reading == "literal":
        value = -1.0 + mf * useful * (per[0].sum() + lattice)
    else:
        raise ValueError(f"unknown reading {reading!r}")
    return Expectation(value)
