"""Command line: run configured campaigns, figure presets, self-validation
and expected-ISR tables.

Configuration files are INI-style. Keys live in sections (``[radio]``,
``[network]``, ...) or are written flat with a dotted prefix
(``radio.k_fpc = 0.7``). Every omitted key takes its default; the resolved
configuration is written back as ``manifest.ini`` next to the outputs and can
be run again as is.
"""

from __future__ import annotations

import argparse
import cmath
import configparser
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    dl_to_ul_closed_form,
    expected_dl_to_dl,
    expected_dl_to_ul,
    expected_ul_to_dl,
    expected_ul_to_ul,
    lattice_series,
    origin_lattice_oracle,
    ring_average_oracle,
)
from .antenna import BeamKind, BeamMode, pattern_gain
from .channel import RadioConfig, sample_shadow_ratio, shadow_mean_factor
from .geometry import SECTOR_AZIMUTHS, build_lattice
from .montecarlo import CampaignSpec, compare_mc_analytic, coverage_curve, run_campaign
from .scenario import Direction, TddConfig, TddMode
from .specfun import hurwitz_zeta, omega, riemann_zeta

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "SCHEMA",
    "PRESETS",
    "load_config",
    "parse_config",
    "run_scenario",
    "run_preset",
    "validate",
    "analytic_table",
    "main",
]


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text: str):
    t = text.strip()
    return None if t in ("", "none") else float(t)


# section -> key -> (parser, default). A default of None for theta_h3db_deg
# means "65 for sector_only, 14 otherwise".
SCHEMA: dict[str, dict[str, tuple]] = {
    "campaign": {
        "name": (str, "scenario"),
        "n_drops": (int, 20000),
        "seed": (int, 1),
        "direction": (str, "dl"),
        "serving_law": (str, "area"),
        "z0_x": (_opt_float, None),
        "z0_angle_deg": (float, 60.0),
    },
    "network": {
        "delta_km": (float, 0.75),
        "rings": (int, 5),
    },
    "tdd": {
        "mode": (str, "dynamic"),
        "alpha_d": (float, 0.5),
    },
    "antenna": {
        "mode": (str, "beam3d"),
        "theta_h3db_deg": (_opt_float, None),
        "theta_v3db_deg": (float, 8.0),
        "downtilt_deg": (float, 8.0),
        "back_lobe": (float, 0.0),
    },
    "radio": {
        "p_dl_dbm": (float, 43.0),
        "p_star_dbm": (float, 20.0),
        "p_noise_dbm": (float, -93.0),
        "a_db": (float, 130.0),
        "two_b": (float, 3.5),
        "k_fpc": (float, 0.4),
        "sigma_db": (float, 6.0),
        "l_b_km": (float, 0.02),
        "g_ant_db": (float, 17.5),
        "eta": (float, 1.0),
        "d_min_km": (float, 0.001),
        "gain_in_power": (_bool, False),
    },
}


@dataclass
class ScenarioConfig:
    """Fully resolved configuration in file units (dB, degrees, km)."""

    values: dict = field(default_factory=dict)

    @classmethod
    def defaults(cls) -> "ScenarioConfig":
        vals = {sec: {k: d for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}
        cfg = cls(vals)
        cfg._resolve()
        return cfg

    def __getitem__(self, dotted: str):
        sec, key = dotted.split(".")
        return self.values[sec][key]

    def with_(self, **changes) -> "ScenarioConfig":
        """Copy with ``section__key=value`` overrides."""
        vals = {sec: dict(keys) for sec, keys in self.values.items()}
        for name, value in changes.items():
            sec, key = name.split("__")
            if key not in SCHEMA.get(sec, {}):
                raise ConfigError(f"unknown key {sec}.{key}")
            vals[sec][key] = value
        out = ScenarioConfig(vals)
        out._resolve()
        return out

    def _resolve(self):
        ant = self.values["antenna"]
        if ant["theta_h3db_deg"] is None:
            ant["theta_h3db_deg"] = 65.0 if ant["mode"] == BeamKind.SECTOR_ONLY.value else 14.0

    def to_spec(self) -> CampaignSpec:
        v = self.values
        try:
            radio = v["radio"]
            cfg = RadioConfig(
                p_dl_dbm=radio["p_dl_dbm"],
                p_star_dbm=radio["p_star_dbm"],
                p_noise_dbm=radio["p_noise_dbm"],
                a_db=radio["a_db"],
                two_b=radio["two_b"],
                k_fpc=radio["k_fpc"],
                sigma_db=radio["sigma_db"],
                l_b=radio["l_b_km"],
                g_ant_db=radio["g_ant_db"],
                eta=radio["eta"],
                d_min=radio["d_min_km"],
                gain_in_power=radio["gain_in_power"],
            )
            ant = v["antenna"]
            mode = BeamMode(
                BeamKind(ant["mode"]),
                theta_h3db=math.radians(ant["theta_h3db_deg"]),
                theta_v3db=math.radians(ant["theta_v3db_deg"]),
                fixed_downtilt=math.radians(ant["downtilt_deg"]),
                back_lobe=ant["back_lobe"],
            )
            tdd = TddConfig(TddMode(v["tdd"]["mode"]), v["tdd"]["alpha_d"])
            net = v["network"]
            if net["rings"] < 0:
                raise ValueError(f"rings must be nonnegative, got {net['rings']}")
            if not net["delta_km"] > 0:
                raise ValueError(f"delta_km must be positive, got {net['delta_km']}")
            camp = v["campaign"]
            z0 = None
            if camp["z0_x"] is not None:
                x = camp["z0_x"]
                if not 0 < x <= 2.0 / 3.0:
                    raise ValueError(f"z0_x must lie in (0, 2/3], got {x}")
                z0 = x * net["delta_km"] * cmath.exp(1j * math.radians(camp["z0_angle_deg"]))
            return CampaignSpec(
                n_drops=camp["n_drops"],
                seed=camp["seed"],
                tdd=tdd,
                mode=mode,
                cfg=cfg,
                layout=build_lattice(net["delta_km"], net["rings"]),
                direction=Direction(camp["direction"]),
                z0=z0,
                serving_law=camp["serving_law"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_ini(self) -> str:
        lines = [f"# dtdd3d {__version__} resolved configuration", ""]
        for sec, keys in self.values.items():
            lines.append(f"[{sec}]")
            for key, value in keys.items():
                lines.append(f"{key} = {_format_value(value)}")
            lines.append("")
        lines += ["[manifest]", f"version = {__version__}", ""]
        return "\n".join(lines)


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_text(text: str, source: str = "<string>") -> ScenarioConfig:
    # A synthetic leading section lets flat dotted keys precede any header.
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[__top__]\n" + text, source=source)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] - 1
        line = text.splitlines()[lineno - 1].strip()
        raise ConfigError(f"{source}:{lineno}: cannot parse {line!r} (expected key = value)") from exc
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"{source}:{exc.lineno - 1}: duplicate key {exc.option!r}") from exc
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"{source}:{exc.lineno - 1}: duplicate section [{exc.section}]") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    lines = text.splitlines()

    def where(sec, key):
        for i, line in enumerate(lines, 1):
            head = line.split("=", 1)[0].split(":", 1)[0].strip()
            if head in (key, f"{sec}.{key}"):
                return f"{source}:{i}"
        return source

    raw: dict[tuple[str, str], str] = {}
    for sec in parser.sections():
        if sec == "manifest":
            continue
        for key, value in parser.items(sec):
            if sec == "__top__":
                if "." not in key:
                    raise ConfigError(f"{where(sec, key)}: key {key!r} needs a section or a dotted prefix")
                s, k = key.split(".", 1)
            else:
                s, k = sec, key
            if s not in SCHEMA or k not in SCHEMA[s]:
                raise ConfigError(f"{where(s, k)}: unknown key {s}.{k}")
            raw[(s, k)] = value

    vals = {sec: {k: d for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}
    for (s, k), text_value in raw.items():
        conv = SCHEMA[s][k][0]
        try:
            vals[s][k] = conv(text_value)
        except ValueError as exc:
            raise ConfigError(f"{where(s, k)}: {s}.{k}: {exc}") from exc
    cfg = ScenarioConfig(vals)
    cfg._resolve()
    cfg.to_spec()  # validate now so errors surface at load time
    return cfg


def load_config(path) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{p}: {exc.strerror or exc}") from exc
    return _parse_text(text, str(p))


def parse_config(path) -> CampaignSpec:
    """Read a configuration file into a :class:`CampaignSpec`."""
    return load_config(path).to_spec()


# --------------------------------------------------------------------------
# runs


def _write_csv(path: Path, header, rows):
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([repr(float(v)) if not isinstance(v, (int, np.integer)) else str(int(v)) for v in row])
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def run_scenario(config: ScenarioConfig, out_dir, workers: int = 1) -> dict:
    """Run one configured campaign and write ``sinr_samples.csv``,
    ``coverage.csv`` and ``manifest.ini`` into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"{out}: {exc.strerror or exc}") from exc
    spec = config.to_spec()
    res = run_campaign(spec, workers=workers)
    with np.errstate(divide="ignore"):
        sinr_db = res.sinr_db
    _write_csv(
        out / "sinr_samples.csv",
        ["drop_index", "x", "sinr_db", "isr_bs", "isr_mobile"],
        zip(range(len(res)), res.x, sinr_db, res.isr_bs, res.isr_mobile),
    )
    curve = coverage_curve(res)
    _write_csv(out / "coverage.csv", ["gamma_db", "theta", "stderr"], zip(curve.gamma_grid, curve.theta, curve.stderr))
    try:
        (out / "manifest.ini").write_text(config.to_ini(), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"{out / 'manifest.ini'}: {exc.strerror or exc}") from exc
    return {"out": str(out), "drops": len(res), "curve": curve}


def _mode_changes(mode: str, theta_h=None):
    ch = {"antenna__mode": mode, "antenna__theta_h3db_deg": theta_h}
    return ch


_MODES = ("sector_only", "beam2d", "beam3d")


def _fig2():
    curves = {}
    for m in _MODES:
        curves[f"stdd_{m}"] = {"tdd__mode": "static_dl", "campaign__direction": "dl", **_mode_changes(m)}
    for a in (0.75, 0.5):
        for m in _MODES:
            curves[f"dtdd_a{a}_{m}"] = {"tdd__mode": "dynamic", "tdd__alpha_d": a, "campaign__direction": "dl", **_mode_changes(m)}
    return curves


def _fig3():
    curves = {"stdd_ul": {"tdd__mode": "static_ul", "campaign__direction": "ul", **_mode_changes("sector_only")}}
    for a in (0.75, 0.5):
        for m in _MODES:
            # alpha here is the uplink probability of neighbouring sites
            curves[f"dtdd_au{a}_{m}"] = {
                "tdd__mode": "dynamic", "tdd__alpha_d": 1.0 - a, "campaign__direction": "ul", **_mode_changes(m)
            }
    return curves


_WIDTHS = (30.0, 20.0, 14.0, 8.0)


def _fig4():
    curves = {}
    for tdd in ("static_dl", "dynamic"):
        for th in _WIDTHS:
            curves[f"{'stdd' if tdd == 'static_dl' else 'dtdd'}_h{th:g}"] = {
                "tdd__mode": tdd, "tdd__alpha_d": 0.5, "campaign__direction": "dl", **_mode_changes("beam3d", th)
            }
    return curves


def _fig5():
    curves = {"stdd_ul": {"tdd__mode": "static_ul", "campaign__direction": "ul", **_mode_changes("sector_only")}}
    for th in _WIDTHS:
        curves[f"dtdd_h{th:g}"] = {
            "tdd__mode": "dynamic", "tdd__alpha_d": 0.5, "campaign__direction": "ul", **_mode_changes("beam3d", th)
        }
    return curves


def _fig6():
    curves = {}
    for m in ("sector_only", "beam3d"):
        for k in (0.4, 0.7, 1.0):
            curves[f"dtdd_k{k}_{m}"] = {
                "tdd__mode": "dynamic", "tdd__alpha_d": 0.5, "campaign__direction": "ul",
                "radio__k_fpc": k, **_mode_changes(m),
            }
    return curves


PRESETS = {"fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5, "fig6": _fig6}


def preset_configs(name: str, base: ScenarioConfig | None = None) -> dict[str, ScenarioConfig]:
    """Per-curve configurations of a figure preset."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    base = base or ScenarioConfig.defaults()
    return {curve: base.with_(campaign__name=f"{name}/{curve}", **ch) for curve, ch in PRESETS[name]().items()}


def run_preset(name: str, out_dir, base: ScenarioConfig | None = None, workers: int = 1) -> dict:
    out = Path(out_dir) / name
    return {curve: run_scenario(cfg, out / curve, workers) for curve, cfg in preset_configs(name, base).items()}


# --------------------------------------------------------------------------
# validate


def _check(name, passed, **detail):
    return {"name": name, "passed": bool(passed), **detail}


def validate(config: ScenarioConfig | None = None, strict: bool = False, omega_override=None, workers: int = 1) -> dict:
    """Identity, oracle and simulation-vs-expectation checks.

    ``omega_override`` replaces the omega function in the series and closed
    form checks (a fault-injection hook).
    """
    config = config or ScenarioConfig.defaults()
    spec = config.to_spec()
    om = omega_override or omega
    checks = []

    ident = [
        abs(riemann_zeta(2.0) / (math.pi**2 / 6) - 1),
        abs(riemann_zeta(4.0) / (math.pi**4 / 90) - 1),
        abs(hurwitz_zeta(3.5, 1.0) / riemann_zeta(3.5) - 1),
        abs(hurwitz_zeta(3.0, 0.5) / ((2**3 - 1) * riemann_zeta(3.0)) - 1),
    ]
    checks.append(_check("zeta_identities", max(ident) <= 1e-12, max_rel_error=max(ident), tolerance=1e-12))

    half = [abs(pattern_gain(math.radians(t) / 2, BeamMode(theta_h3db=math.radians(t)).w_h) - 0.5) for t in (8, 14, 20, 30, 65)]
    checks.append(_check("half_power", max(half) <= 1e-12, max_abs_error=max(half), tolerance=1e-12))

    b = spec.cfg.b
    errs = []
    for x in (0.1, 0.2, 0.3, 0.4, 0.5):
        s = lattice_series(x, b, omega_fn=om).value
        o = ring_average_oracle(x, 2 * b)
        errs.append(abs(s - o) / o)
    checks.append(_check("series_vs_oracle", max(errs) <= 1e-3, max_rel_error=max(errs), tolerance=1e-3))

    errs = []
    for k in (0.0, 0.4, 1.0):
        c = dl_to_ul_closed_form(0.3, b, k, omega_fn=om)
        o = origin_lattice_oracle(0.3, 2 * b, k)
        errs.append(abs(c - o) / o)
    checks.append(_check("closed_form_vs_oracle", max(errs) <= 1e-6, max_rel_error=max(errs), tolerance=1e-6))

    rng = np.random.default_rng(spec.seed)
    draws = sample_shadow_ratio(spec.cfg, rng, size=1_000_000)
    target = shadow_mean_factor(spec.cfg.sigma_tilde_db)
    rel = abs(draws.mean() / target - 1)
    checks.append(_check("shadow_mean", rel <= 0.01, rel_error=rel, tolerance=0.01))

    z0 = spec.z0 if spec.z0 is not None else 0.3 * spec.layout.delta * cmath.exp(1j * SECTOR_AZIMUTHS[0])
    n = 100_000 if strict else 20_000
    runs = [("config", spec.with_(z0=z0, n_drops=n))]
    if strict:
        zero = RadioConfig(**{**spec.cfg.__dict__, "sigma_db": 0.0})
        for rings in (1, 5):
            for m in (BeamMode.sector_only(), BeamMode.beam_2d()):
                lay = build_lattice(spec.layout.delta, rings)
                z = 0.3 * lay.delta * cmath.exp(1j * SECTOR_AZIMUTHS[0])
                runs.append((f"sigma0_{m.kind.value}_r{rings}", spec.with_(z0=z, n_drops=n, cfg=zero, mode=m, layout=lay)))
    for label, s in runs:
        for row in compare_mc_analytic(s, workers=workers):
            z = row.z_score
            checks.append(
                _check(
                    f"mean_{label}_{row.component}",
                    abs(z) < 3.0,
                    mc_mean=row.mc_mean,
                    mc_stderr=row.mc_stderr,
                    analytic=row.analytic,
                    analytic_stderr=row.analytic_stderr,
                    z_score=z if math.isfinite(z) else str(z),
                )
            )
    return {"passed": all(c["passed"] for c in checks), "strict": strict, "checks": checks}


# --------------------------------------------------------------------------
# analytic table


def analytic_table(config: ScenarioConfig, xs=(0.1, 0.2, 0.3, 0.4, 0.5), reading: str = "conditioned"):
    """Expected ISR components on the infinite lattice along the serving azimuth."""
    spec = config.to_spec()
    cfg, mode, tdd = spec.cfg, spec.mode, spec.tdd
    delta = spec.layout.delta
    rows = []
    for x in xs:
        z0 = x * delta * cmath.exp(1j * SECTOR_AZIMUTHS[0])
        rows.append(
            {
                "x": x,
                "D_down": expected_dl_to_dl(z0, cfg, mode, tdd.p_downlink, delta, reading=reading).value,
                "D_up": expected_ul_to_dl(z0, cfg, mode, tdd.alpha_u, delta).value,
                "U_down": expected_dl_to_ul(x, cfg, mode, tdd.p_downlink, delta).value,
                "U_up": expected_ul_to_ul(x, cfg, tdd.alpha_u, delta, reading=reading).value,
            }
        )
    return rows


# --------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dtdd3d", description="D-TDD macro-cell coverage with 3D beamforming")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one configured campaign")
    r.add_argument("config")
    r.add_argument("--out", default="out")
    r.add_argument("--seed", type=int)
    r.add_argument("--drops", type=int)
    r.add_argument("--workers", type=int, default=1)

    s = sub.add_parser("sweep", help="run a figure preset")
    s.add_argument("--preset", required=True, choices=sorted(PRESETS))
    s.add_argument("--config", help="base configuration for every curve")
    s.add_argument("--out", default="out")
    s.add_argument("--seed", type=int)
    s.add_argument("--drops", type=int)
    s.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("validate", help="self-checks; JSON report, nonzero exit on failure")
    v.add_argument("config", nargs="?")
    v.add_argument("--strict", action="store_true", help="1e5 drops and the sigma=0 layout grid")
    v.add_argument("--workers", type=int, default=1)

    a = sub.add_parser("analytic", help="print the expected-ISR table")
    a.add_argument("config")
    a.add_argument("--reading", choices=("conditioned", "literal"), default="conditioned")
    return p


def _overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    ch = {}
    if getattr(args, "seed", None) is not None:
        ch["campaign__seed"] = args.seed
    if getattr(args, "drops", None) is not None:
        ch["campaign__n_drops"] = args.drops
    return cfg.with_(**ch) if ch else cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = _overrides(load_config(args.config), args)
            info = run_scenario(cfg, args.out, workers=args.workers)
            print(f"wrote {info['drops']} drops to {info['out']}")
        elif args.command == "sweep":
            base = load_config(args.config) if args.config else ScenarioConfig.defaults()
            base = _overrides(base, args)
            for curve, info in run_preset(args.preset, args.out, base, workers=args.workers).items():
                print(f"{curve}: {info['out']}")
        elif args.command == "validate":
            cfg = load_config(args.config) if args.config else None
            report = validate(cfg, strict=args.strict, workers=args.workers)
            json.dump(report, sys.stdout, indent=2)
            print()
            return 0 if report["passed"] else 1
        elif args.command == "analytic":
            rows = analytic_table(load_config(args.config), reading=args.reading)
            cols = list(rows[0])
            print("  ".join(f"{c:>14}" for c in cols))
            for row in rows:
                print("  ".join(f"{row[c]:>14.6g}" for c in cols))
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
