"""Experiment harness: argument/config handling, orchestration, CSV/JSON output.

Config resolution: an optional JSON file (--config) provides defaults, flags
override individual entries. Each run writes its data files plus a manifest
(resolved config, calibration constants, grid resolutions, wall time,
library version) into --out; re-running from a manifest reproduces the CSV
bytes exactly.
"""

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import cutoff as cutoff_mod
from . import kernel as kernel_mod
from . import schroedinger, space as space_mod, spherical, transform
from .errors import ConfigError, HyperwaveError

KINDS = ("phi", "transform", "evolve", "converge", "maximal", "schur")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2


@dataclass
class ExperimentConfig:
    kind: str
    space: str = "H3R"
    dim: int | None = None  # for the HnR preset
    a: float = 2.0
    s: float | str = 0.6
    lam: float = 2.0
    t: float = 0.5
    path: str = "ode"
    direction: str = "roundtrip"
    profile: str = "heat"
    family: str = "default"
    q_list: list = field(default_factory=lambda: [1.2, 1.6, 2.1, 3.0])
    lam_c_list: list = field(default_factory=lambda: [4.0, 8.0, 16.0])
    n_times: int = 512
    times: list = field(default_factory=lambda: [1e-1, 1e-2, 1e-3])
    ball: float = 1.0
    tmax: float = transform.DEFAULT_TMAX
    radial_panels: int = transform.DEFAULT_RADIAL_PANELS
    lam_max: float = transform.DEFAULT_LMAX
    spectral_panels: int = transform.DEFAULT_SPECTRAL_PANELS
    kernel_lam_min: float = kernel_mod.LAM_MIN
    kernel_lam_max: float = kernel_mod.LAM_MAX
    kernel_grid_points: int = kernel_mod.N_GRID
    check_stability: bool = False
    out: str | None = None

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.kind in ("evolve", "converge", "maximal", "schur") and not self.a > 1.0:
            raise ConfigError(
                f"fractional order a = {self.a} is invalid: the maximal "
                "estimate requires a > 1"
            )
        s = self.resolved_s()
        if self.kind in ("converge", "maximal") and not s > 0.0:
            raise ConfigError(f"regularity s = {s} must be positive")
        if self.t < 0.0:
            raise ConfigError("t must be non-negative")
        if self.radial_panels < 8 or self.spectral_panels < 8:
            raise ConfigError("panel counts must be at least 8")
        if not 0.0 < self.ball <= 4.0:
            raise ConfigError("ball radius must lie in (0, 4]")

    def resolved_s(self):
        if self.s == "auto":
            return 0.5 * (self.a - 1.0)
        try:
            return float(self.s)
        except (TypeError, ValueError):
            raise ConfigError(f"invalid s value {self.s!r}") from None

    def space_params(self):
        try:
            return space_mod.preset(self.space, dim=self.dim)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def _float_repr(x):
    return f"{float(x):.17g}"


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, str):
                cells.append(cell)
            else:
                cells.append(_float_repr(cell))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _experiment_members(config, params):
    del params
    members = []
    for lam_c in config.lam_c_list:
        for q in config.q_list:
            members.append(transform.FamilyMember(
                profile_id=f"q{q:g}_L{lam_c:g}", q=float(q), lam_c=float(lam_c)))
    return members


def _resolve_spectral_profile(config, params):
    """Spectral side of a named profile token."""
    grid = transform.default_spectral_grid(config.lam_max, config.spectral_panels)
    token = config.profile
    if token == "heat":
        vals = np.exp(-(grid**2 + params.rho**2))
        return transform.SpectralProfile(grid=grid, values=vals.astype(complex),
                                         space=params), "heat"
    if token == "gauss":
        f = transform.reference_bump(params)
        return transform.forward(f, spectral_grid=grid), "gauss"
    if token.startswith("q"):
        spec = token[1:].lstrip("=")
        if "_L" in spec:
            q_part, lam_part = spec.split("_L", 1)
        else:
            q_part, lam_part = spec, "8"
        try:
            member = transform.FamilyMember(
                profile_id=f"q{float(q_part):g}_L{float(lam_part):g}",
                q=float(q_part), lam_c=float(lam_part))
        except ValueError:
            raise ConfigError(f"cannot parse profile token {token!r}") from None
        return transform.family_spectral(params, member, grid=grid), member.profile_id
    raise ConfigError(f"unknown profile {token!r}")


def _require_rho_flag(params):
    if not params.rho_ge_one:
        raise ConfigError(
            f"space {params!r} has rho = {params.rho} < 1; the sharp-decay "
            "estimates the experiments rely on assume rho >= 1"
        )


def _run_phi(config, params, outdir):
    report = spherical.phi_report(params, config.lam, config.t, path=config.path)
    payload = {
        "space": config.space, "lambda": config.lam, "t": config.t,
        "path": report.path, "value": report.value, "est_error": report.est_error,
    }
    text = json.dumps(payload, sort_keys=True)
    print(text)
    files = {}
    if outdir is not None:
        (outdir / "phi.json").write_text(text + "\n", encoding="utf-8")
        files["phi.json"] = payload
    return files


def _run_transform(config, params, outdir):
    fh, _label = _resolve_spectral_profile(config, params)
    radial_grid = transform.default_radial_grid(config.tmax, config.radial_panels)
    if config.direction == "forward":
        f = transform.inverse(fh, radial_grid=radial_grid)
        result = transform.forward(
            f, spectral_grid=transform.default_spectral_grid(config.lam_max,
                                                             config.spectral_panels))
        grid, vals = result.grid, result.values
    elif config.direction == "inverse":
        result = transform.inverse(fh, radial_grid=radial_grid)
        grid, vals = result.grid, np.asarray(result.values, dtype=complex)
    elif config.direction == "roundtrip":
        f = transform.inverse(fh, radial_grid=radial_grid)
        fh2 = transform.forward(
            f, spectral_grid=transform.default_spectral_grid(config.lam_max,
                                                             config.spectral_panels))
        back = transform.inverse(fh2, radial_grid=radial_grid)
        grid, vals = back.grid, np.asarray(back.values, dtype=complex)
    else:
        raise ConfigError(f"unknown transform direction {config.direction!r}")
    vals = np.asarray(vals, dtype=complex)
    rows = [(g, v.real, v.imag) for g, v in zip(grid, vals)]
    _write_csv(outdir / "transform.csv", ("grid", "value_re", "value_im"), rows)
    return {"transform.csv": {"rows": len(rows), "direction": config.direction}}


def _run_evolve(config, params, outdir):
    fh, label = _resolve_spectral_profile(config, params)
    radial_grid = transform.default_radial_grid(config.tmax, config.radial_panels)
    prof = schroedinger.propagate(fh, config.t, config.a, radial_grid=radial_grid)
    vals = np.asarray(prof.values, dtype=complex)
    rows = [(g, v.real, v.imag) for g, v in zip(prof.grid, vals)]
    _write_csv(outdir / "evolve.csv", ("radius", "re", "im"), rows)
    return {"evolve.csv": {"rows": len(rows), "profile": label, "t": config.t}}


def _run_converge(config, params, outdir):
    _require_rho_flag(params)
    s = config.resolved_s()
    member = None
    for cand in _experiment_members(config, params):
        if transform.member_in_sobolev(params, cand, s):
            member = cand  # keep the last (smoothest) matching member
    if member is None:
        raise ConfigError(f"no family member lies in H^{s} for this space")
    rows_data = schroedinger.converge_study(params, config.a, s, member=member,
                                            times=tuple(config.times), ball=config.ball)
    rows = [(r.t, r.l2_error_on_ball, r.sup_error_on_ball) for r in rows_data]
    _write_csv(outdir / "converge.csv", ("t", "l2_error_on_B", "sup_error_on_B"), rows)
    return {
        "converge.csv": {"rows": len(rows), "profile": member.profile_id},
        "notes": ["initial data decays rapidly but is not compactly supported"],
    }


def _run_maximal(config, params, outdir):
    _require_rho_flag(params)
    s = config.resolved_s()
    members = _experiment_members(config, params)
    rows_data = schroedinger.maximal_study(params, config.a, s, members=members,
                                           n_times=config.n_times, ball=config.ball)
    rows = [(r.profile_id, r.hs_norm, r.maximal_l2, r.ratio) for r in rows_data]
    _write_csv(outdir / "maximal.csv", ("profile_id", "hs_norm", "maximal_l2", "ratio"),
               rows)
    return {"maximal.csv": {"rows": len(rows), "s": s,
                            "sup_ratio": max(r.ratio for r in rows_data)}}


def _run_schur(config, params, outdir):
    _require_rho_flag(params)
    s = config.resolved_s()
    grid = kernel_mod.default_grid(config.kernel_lam_min, config.kernel_lam_max,
                                   config.kernel_grid_points)
    report = kernel_mod.schur_bound_report(params, s=s, a=config.a, lam_grid=grid,
                                           check_stability=config.check_stability)
    rows = [(r.eta, r.piece_low, r.piece_band, r.piece_tail, r.row_integral)
            for r in report.rows]
    _write_csv(outdir / "schur.csv", ("eta", "I1", "I2", "I3", "row_integral"), rows)
    summary = {
        "sup_row": report.sup_row,
        "argmax_eta": report.argmax_eta,
        "sup_col": report.sup_col,
        "stability_pct": report.cutoff_stability_pct,
        "s": s,
        "a": config.a,
    }
    (outdir / "schur_summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return {"schur.csv": {"rows": len(rows)}, "schur_summary.json": summary}


_RUNNERS = {
    "phi": _run_phi,
    "transform": _run_transform,
    "evolve": _run_evolve,
    "converge": _run_converge,
    "maximal": _run_maximal,
    "schur": _run_schur,
}


def run(config):
    """Execute one experiment; returns (exit_status, manifest dict or None)."""
    from pathlib import Path

    config.validate()
    params = config.space_params()
    outdir = None
    if config.out is not None:
        outdir = Path(config.out)
        outdir.mkdir(parents=True, exist_ok=True)
    elif config.kind != "phi":
        raise ConfigError(f"experiment {config.kind!r} needs --out DIR")

    started = time.time()
    files = _RUNNERS[config.kind](config, params, outdir)
    wall = time.time() - started

    cal = space_mod.calibration_for(params)
    manifest = {
        "experiment": config.kind,
        "version": __version__,
        "config": asdict(config),
        "calibration": None if cal is None else {
            "c_forward": cal.c_forward, "c_inverse": cal.c_inverse,
            "n_scale": cal.n_scale,
        },
        "grids": {
            "tmax": config.tmax, "radial_panels": config.radial_panels,
            "lam_max": config.lam_max, "spectral_panels": config.spectral_panels,
            "panel_order": transform.PANEL_ORDER,
        },
        "cutoffs": {
            "spatial": asdict(cutoff_mod.default_spatial()),
            "temporal": asdict(cutoff_mod.default_temporal()),
        },
        "wall_time_s": wall,
        "files": files,
    }
    if outdir is not None:
        (outdir / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK, manifest


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2
        raise ConfigError(message)


def _build_parser():
    parser = _Parser(prog="hyperwave",
                     description="radial harmonic analysis experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="kind")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (or a manifest)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--space", help="space preset (H3R, HnR, H2C, H2H, CayP)")
    common.add_argument("--dim", type=int, help="dimension for the HnR preset")

    p = sub.add_parser("phi", parents=[common], help="spherical function value")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--path", choices=("ode", "bessel", "asym"))

    p = sub.add_parser("transform", parents=[common], help="spherical transform")
    p.add_argument("--profile")
    p.add_argument("--dir", dest="direction", choices=("forward", "inverse", "roundtrip"))

    p = sub.add_parser("evolve", parents=[common], help="propagate one time step")
    p.add_argument("--a", type=float)
    p.add_argument("--profile")
    p.add_argument("--t", type=float)

    p = sub.add_parser("converge", parents=[common], help="small-time convergence study")
    p.add_argument("--a", type=float)
    p.add_argument("--s", help="Sobolev regularity (number or 'auto')")

    p = sub.add_parser("maximal", parents=[common], help="maximal-operator ratios")
    p.add_argument("--a", type=float)
    p.add_argument("--s", help="Sobolev regularity (number or 'auto')")
    p.add_argument("--family", choices=("default",))
    p.add_argument("--n-times", dest="n_times", type=int)

    p = sub.add_parser("schur", parents=[common], help="kernel row-integral report")
    p.add_argument("--a", type=float)
    p.add_argument("--s", help="Sobolev weight exponent (number or 'auto')")
    p.add_argument("--check-stability", dest="check_stability", action="store_true",
                   default=None)
    return parser


def build_config(argv):
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.kind is None:
        raise ConfigError("an experiment kind is required (phi, transform, evolve, "
                          "converge, maximal, schur)")
    base = {}
    if getattr(ns, "config", None):
        from pathlib import Path

        try:
            loaded = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from None
        if "config" in loaded and "experiment" in loaded:  # manifest re-run
            loaded = loaded["config"]
        base.update(loaded)
    base["kind"] = ns.kind
    if ns.kind == "schur" and "s" not in base:
        base["s"] = "auto"  # the kernel weight defaults to (a-1)/2
    for key, value in vars(ns).items():
        if key in ("config", "kind") or value is None:
            continue
        base[key] = value
    valid = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}
    unknown = set(base) - valid
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**base)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = build_config(argv)
        status, _manifest = run(config)
        return status
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HyperwaveError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
