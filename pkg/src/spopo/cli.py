"""Command line runner: spopo <subcommand> --config <path> --out <dir> [--seed N].

Subcommands: supermodes | squeezing | pulses | metrology.  All outputs are CSV
with a one-line header preceded by '#' metadata lines (tool version, config
hash, seed); errors are emitted as a JSON object on stderr with a stable code
and mapped to exit codes 2 (config), 3 (physics domain), 4 (numerical).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cavity import squeezing_spectrum, threshold_gain
from .config import REFERENCE_ENERGY, ScenarioConfig, load_scenario
from .errors import AtThresholdError, SpopoError, ValidationError
from .kernel import build_kernel
from .metrology import improvement_curve, optimal_probe
from .pulses import covariance, duan_sum, min_variance_transcendental
from .supermodes import schmidt_decompose

_FLOAT_FMT = "%.12g"


def _write_csv(path: Path, header: list[str], rows, metadata: dict) -> Path:
    lines = [f"# {key} = {value}" for key, value in metadata.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(
            item if isinstance(item, str) else _FLOAT_FMT % item for item in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _metadata(cfg: ScenarioConfig, seed) -> dict:
    return {"spopo_version": __version__, "config_hash": cfg.config_hash,
            "seed": "none" if seed is None else seed}


def _decompose(cfg: ScenarioConfig):
    """Kernel decomposition plus exact gain rescaling for pump_ratio configs.

    Gains scale as sqrt(pulse_energy), so a threshold ratio translates into a
    pure multiplicative factor on the reference-energy gains; mode shapes are
    energy independent.
    """
    kernel = build_kernel(cfg.grid, cfg.pump, cfg.crystal)
    basis = schmidt_decompose(kernel, cfg.run.get("gain_cutoff", 1e-6),
                              rep_period=cfg.pump.rep_period)
    gth = threshold_gain(cfg.cavity, cfg.pump.ceo_half).gain
    if cfg.pump_ratio is not None:
        if basis.gains[0] <= 0:
            if cfg.pump_ratio > 0:
                raise ValidationError(
                    "cannot scale to a nonzero pump ratio: reference gain is 0")
            scale = 0.0
        else:
            scale = cfg.pump_ratio * gth / basis.gains[0]
        gains = basis.gains * scale
        energy = REFERENCE_ENERGY * scale**2
    else:
        gains = basis.gains
        energy = cfg.pump.pulse_energy
    if gains.size and gains[0] >= gth:
        raise AtThresholdError(
            f"pump drives g0 = {gains[0]:.6g} at/above threshold {gth:.6g}")
    return basis, gains, gth, energy


def run_supermodes(cfg: ScenarioConfig, outdir: Path, seed=None) -> list[Path]:
    basis, gains, gth, energy = _decompose(cfg)
    meta = _metadata(cfg, seed)
    meta.update(threshold_gain=_FLOAT_FMT % gth,
                effective_pulse_energy=_FLOAT_FMT % energy,
                n_kept=basis.n_kept)
    written = [_write_csv(outdir / "gains.csv", ["index", "gain"],
                          ((n, g) for n, g in enumerate(gains)), meta)]
    n_dump = min(basis.n_kept, int(cfg.run.get("n_modes_dump", 8)))
    omegas = basis.grid.omegas
    for n in range(n_dump):
        mode = basis.modes_freq[:, n]
        written.append(_write_csv(
            outdir / f"mode_{n:03d}.csv", ["omega", "re_psi", "im_psi"],
            zip(omegas, mode.real, mode.imag), meta))
    if cfg.run.get("dump_kernel", False):
        flat = basis.kernel.matrix.ravel()
        kmeta = dict(meta, shape=f"{basis.grid.n_points}x{basis.grid.n_points}",
                     order="row-major")
        written.append(_write_csv(outdir / "kernel.csv", ["re", "im"],
                                  zip(flat.real, flat.imag), kmeta))
    return written


def run_squeezing(cfg: ScenarioConfig, outdir: Path, seed=None) -> list[Path]:
    basis, gains, gth, _ = _decompose(cfg)
    theta_max = cfg.run.get("theta_max", np.pi)
    theta_points = int(cfg.run.get("theta_points", 121))
    thetas = np.linspace(-theta_max, theta_max, theta_points)
    spectrum = squeezing_spectrum(gains[:basis.n_kept], cfg.cavity,
                                  cfg.pump.ceo_half, thetas)
    rows = []
    for i in range(spectrum.gains.size):
        for j, th in enumerate(thetas):
            rows.append((th, float(i), spectrum.var_x[i, j],
                         spectrum.var_p[i, j], spectrum.epr[i, j]))
    meta = _metadata(cfg, seed)
    meta.update(threshold_gain=_FLOAT_FMT % gth)
    return [_write_csv(outdir / "squeezing.csv",
                       ["theta", "mode", "var_x", "var_p", "epr_variance"],
                       rows, meta)]


def run_pulses(cfg: ScenarioConfig, outdir: Path, seed=None) -> list[Path]:
    if cfg.pump_ratio is not None:
        gth = threshold_gain(cfg.cavity, cfg.pump.ceo_half).gain
        g0 = cfg.pump_ratio * gth
    else:
        _, gains, gth, _ = _decompose(cfg)
        g0 = float(gains[0])
    r = cfg.cavity.r
    n_max = int(cfg.run.get("N_max", 64))
    meta = _metadata(cfg, seed)
    meta.update(threshold_gain=_FLOAT_FMT % gth)
    rows = []
    for n in range(1, n_max + 1):
        sol = min_variance_transcendental(g0, r, n)
        rows.append((float(n), g0, r, sol.sigma2, sol.sigma2 / 0.5,
                     "nan" if sol.theta_sol is None else _FLOAT_FMT % sol.theta_sol))
    written = [_write_csv(outdir / "sigma2.csv",
                          ["N", "g", "r", "sigma2_abs", "sigma2_normalized",
                           "theta_sol"], rows, meta)]
    n_duan = min(n_max, 12)
    if n_duan >= 2:
        cov = covariance(g0, r, n_duan)
        duan_rows = [(float(d), duan_sum(cov, 0, d)) for d in range(1, n_duan)]
        written.append(_write_csv(outdir / "duan.csv",
                                  ["separation", "duan_sum"], duan_rows, meta))
    if cfg.run.get("dump_matrices", False):
        cov = covariance(g0, r, min(n_max, 64))
        for name, mat in (("v_plus", cov.v_plus), ("v_minus", cov.v_minus)):
            header = [f"c{j}" for j in range(cov.n_pulses)]
            written.append(_write_csv(outdir / f"{name}.csv", header,
                                      (tuple(row) for row in mat), meta))
    return written


def run_metrology(cfg: ScenarioConfig, outdir: Path, seed=None) -> list[Path]:
    gth = threshold_gain(cfg.cavity, cfg.pump.ceo_half).gain
    if "ratios" in cfg.run:
        ratios = [float(x) for x in cfg.run["ratios"]]
    elif cfg.pump_ratio is not None:
        ratios = [cfg.pump_ratio]
    else:
        basis, gains, gth, _ = _decompose(cfg)
        ratios = [float(gains[0] / gth)]
    n_max = int(cfg.run.get("N_max", 100))
    curve = improvement_curve(cfg.cavity, ratios, n_max, cfg.pump.ceo_half)
    meta = _metadata(cfg, seed)
    meta.update(threshold_gain=_FLOAT_FMT % gth)
    rows = []
    for i, ratio in enumerate(curve.ratios):
        for j, n in enumerate(curve.n_values):
            rows.append((ratio, float(n), curve.sigma2[i, j],
                         curve.improvement[i, j], curve.asymptote[i]))
    written = [_write_csv(outdir / "metrology.csv",
                          ["ratio", "N", "sigma2", "improvement", "asymptote"],
                          rows, meta)]
    summary = {
        "spopo_version": __version__,
        "config_hash": cfg.config_hash,
        "threshold_gain": gth,
        "ratios": list(map(float, curve.ratios)),
        "asymptote": list(map(float, curve.asymptote)),
        "min_pulses_to_asymptote": list(map(int, curve.min_pulses_to_asymptote)),
    }
    summary_path = outdir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(summary_path)

    basis, gains, _, _ = _decompose(cfg)
    probe = optimal_probe(basis, cfg.crystal.omega0, cfg.cavity,
                          int(cfg.run.get("probe_pulses", 8)),
                          cfg.run.get("n_bar0", 1e6),
                          gain0=float(gains[0]))
    times = (np.arange(probe.n_pulses)[:, None] * basis.rep_period
             + basis.time_grid[None, :]).ravel()
    pmeta = _metadata(cfg, seed)
    pmeta.update(amplitude=_FLOAT_FMT % probe.amplitude,
                 spectral_spread_sq=_FLOAT_FMT % probe.spectral_spread_sq)
    written.append(_write_csv(outdir / "probe.csv", ["t", "re", "im"],
                              zip(times, probe.envelope.real,
                                  probe.envelope.imag), pmeta))
    return written


_RUNNERS = {
    "supermodes": run_supermodes,
    "squeezing": run_squeezing,
    "pulses": run_pulses,
    "metrology": run_metrology,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spopo",
        description="Below-threshold SPOPO quantum properties: supermodes, "
                    "squeezing spectra, pulse covariances, time-delay bounds.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("supermodes", "gain spectrum and supermode dumps"),
            ("squeezing", "squeezing / EPR spectra versus comb shift theta"),
            ("pulses", "pulse covariance, minimum variance, Duan sweeps"),
            ("metrology", "time-delay improvement curves and optimal probe")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario JSON path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved for future stochastic features; "
                            "recorded in output metadata")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_scenario(args.config)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        written = _RUNNERS[args.command](cfg, outdir, args.seed)
    except SpopoError as exc:
        error = {"error": exc.code, "message": str(exc)}
        if isinstance(exc, AtThresholdError) and exc.theta is not None:
            error["theta"] = exc.theta
        print(json.dumps(error), file=sys.stderr)
        return exc.exit_code
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
