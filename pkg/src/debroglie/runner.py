"""Scenario orchestration behind the ``run`` and ``validate`` commands.

Each scenario writes plot-ready CSV files plus ``report.json`` into the
output directory and returns its metrics dict.

Column contracts
----------------
waveform_*.csv       t, re_V, im_V, abs_V, phase          (t in tau, V in hbar/tau)
density_*.csv        z, density1, density2, re_psi2, im_psi2   (z in d)
target.csv           z, re_phi, im_phi, density_phi
litho_density.csv    z, mean_density, smoothed_target
litho_pixels.csv     z_n, sigma_n, simulated, smoothed_target
width_scan.csv       T, center, hwhm, lobe_hwhm, peak_density
"""
from __future__ import annotations

import logging
import os
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analysis import (chirped_width, density_l2_error, fidelity, first_order_prediction,
                       litho_accumulate, litho_width, monochromatic_width_scan,
                       peak_metrics, sinc2_half_max_root, smoothed_pattern)
from .config import (DEFAULT_SEED, Finding, RunConfig, check_coverage, check_dt, check_grid,
                     missing_fields, resolve, si_params, step_bound, target_extent)
from .core import AMU, PhysicalParams, natural_units, plane_wave_state
from .errors import ConfigurationError
from .io import write_csv, write_report, write_snapshot_csv, write_waveform_csv
from .propagator import EvolutionConfig, evolve
from .pulse import (coverage_fraction, steps_for, synthesize_chirped_delta,
                    synthesize_monochromatic, synthesize_target_pulse)
from .targets import (TargetState, double_hump_pattern, make_double_gaussian,
                      make_from_samples, make_gaussian_target, pixelate)

log = logging.getLogger(__name__)

OUTPUT_ROOT_ENV = "DEBROGLIE_OUTPUT_ROOT"

MASS_NOTE = ("mass note: the frequently quoted argon estimate d = 108 nm, tau = 14.7 us at "
             "F/(2 pi hbar) = 1e9 Hz/cm is reproduced with M = 40 amu (argon); the same "
             "estimate is sometimes printed with M = 30 amu, which instead gives "
             "d = {d30:.1f} nm, tau = {t30:.2f} us.")


def output_dir(rc: RunConfig) -> Path:
    out = Path(rc.output)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not out.is_absolute():
        out = Path(root) / out
    return out


def _echo(rc: RunConfig) -> dict:
    """Input config plus every value resolved to natural units."""
    g = rc.grid
    resolved = {"pulse": rc.pulse, "evolution": rc.evolution, "section": rc.section,
                "seed": rc.seed, "output": rc.output}
    if g is not None:
        resolved["grid"] = {"length": g.length, "num_points": g.num_points, "z_min": g.z_min}
    return dict(rc.raw, resolved=resolved)


def _evolution_config(rc: RunConfig, dt: float) -> EvolutionConfig:
    e = rc.evolution
    return EvolutionConfig(dt=dt, edge_guard_fraction=e["edge_guard_fraction"],
                           edge_amplitude_limit=e["edge_amplitude_limit"],
                           record_every=e["record_every"])


def _si_lengths(rc: RunConfig, metrics: dict, keys) -> None:
    if rc.ctx.units is None:
        return
    d_nm = rc.ctx.units.length_d * 1e9
    for k in keys:
        if k in metrics:
            metrics[k + "_nm"] = metrics[k] * d_nm


def _snap_p0(rc: RunConfig, p0: float, findings: list | None = None) -> float:
    snapped = rc.grid.snap_momentum(p0)
    if findings is not None and not rc.grid.on_lattice(p0):
        findings.append(Finding("warning", "pulse.p0",
                                f"p0={p0:.6g} is off the momentum lattice; using {snapped:.6g}"))
    return snapped


def units_report(mass_kg: float, hz_per_m: float) -> dict:
    """Natural scales and derived single-peak numbers for an SI parameter set."""
    params = PhysicalParams.from_gradient_frequency(mass_kg, hz_per_m)
    u = natural_units(params)
    root = sinc2_half_max_root()
    T = 4.8
    hwhm_d = root * 2.0 / T
    alt = natural_units(PhysicalParams.from_gradient_frequency(30 * AMU, 1e11))  # 1e9 Hz/cm
    return {
        "mass_amu": mass_kg / AMU,
        "gradient_hz_per_cm": hz_per_m / 100,
        "d_m": u.length_d, "d_nm": u.length_d * 1e9,
        "tau_s": u.time_tau, "tau_us": u.time_tau * 1e6,
        "check_F_d_tau_over_hbar": params.force * u.length_d * u.time_tau / params.hbar,
        "chirped_hwhm_at_4.8tau_d": hwhm_d,
        "chirped_hwhm_at_4.8tau_nm": hwhm_d * u.length_d * 1e9,
        "T_4.8tau_us": T * u.time_tau * 1e6,
        "note": MASS_NOTE.format(d30=alt.length_d * 1e9, t30=alt.time_tau * 1e6),
    }


def run_units(rc: RunConfig, out: Path) -> dict:
    si = rc.ctx.si
    m = units_report(si.mass, si.force / (2 * np.pi * si.hbar))
    note = m.pop("note")
    write_report(out / "report.json", m, _echo(rc), [note])
    return m


def run_delta_peak(rc: RunConfig, out: Path) -> dict:
    p, g, params = rc.pulse, rc.grid, rc.params
    T, V = p["T"], p["V_tilde"]
    p0 = _snap_p0(rc, p["p0"])
    _, dt = steps_for(T, step_bound(rc))
    cfg = _evolution_config(rc, dt)
    metrics: dict = {"dt": dt, "steps": int(round(T / dt)),
                     "predicted_hwhm": sinc2_half_max_root() * chirped_width(params, T)}
    runs = []
    if not p["monochromatic"]:
        runs.append(("chirped", synthesize_chirped_delta(V, p0, p["z_star"], T, dt, params)))
    if p["monochromatic"] or p["compare_monochromatic"]:
        runs.append(("monochromatic", synthesize_monochromatic(V, p["z_star"], T, dt, params)))
    for name, wf in runs:
        start = plane_wave_state(g, p0 if name == "chirped" else 0.0)
        final, rec = evolve(start, wf, params, g, cfg)
        pm = peak_metrics(np.abs(final.psi2)**2, g)
        m = {"center": pm.center, "hwhm": pm.hwhm, "lobe_hwhm": pm.lobe_hwhm,
             "peak_density": pm.peak_density,
             "excited_probability": float(rec.excited_probability[-1]),
             "norm_drift": float(abs(rec.norm[-1] / rec.norm[0] - 1))}
        _si_lengths(rc, m, ("center", "hwhm", "lobe_hwhm"))
        metrics[name] = m
        write_waveform_csv(out / f"waveform_{name}.csv", wf, _echo(rc))
        write_snapshot_csv(out / f"density_{name}.csv", final, _echo(rc))
    _si_lengths(rc, metrics, ("predicted_hwhm",))
    if "chirped" in metrics and "monochromatic" in metrics:
        metrics["width_ratio"] = metrics["monochromatic"]["hwhm"] / metrics["chirped"]["hwhm"]
    write_report(out / "report.json", metrics, _echo(rc))
    return metrics


def build_target(rc: RunConfig) -> TargetState:
    s, g = rc.section, rc.grid
    if s["kind"] == "gaussian":
        return make_gaussian_target(g, s["z0"], s["sigma_z"], s["p_c"])
    if s["kind"] == "double_gaussian":
        return make_double_gaussian(g, s["separation"], s["sigma_z"], s["center"], s["p_c"],
                                    s["relative_phase"])
    return make_from_samples(s["path"], "target", g)


def target_p0(rc: RunConfig, target: TargetState, findings: list | None = None) -> float:
    """Configured p0, or the lattice momentum centring the window on the target."""
    if rc.pulse["p0_given"]:
        return _snap_p0(rc, rc.pulse["p0"], findings)
    p, dens, dp = target.lattice_density()
    p_mean = float((p * dens).sum() / dens.sum())
    return rc.grid.snap_momentum(p_mean - 0.5 * rc.params.force * rc.pulse["T"])


def run_target_state(rc: RunConfig, out: Path) -> dict:
    p, g, params = rc.pulse, rc.grid, rc.params
    T = p["T"]
    target = build_target(rc)
    p0 = target_p0(rc, target)
    _, dt = steps_for(T, step_bound(rc))
    wf = synthesize_target_pulse(target, p0, T, dt, p["peak_rabi"], params)
    final, rec = evolve(plane_wave_state(g, p0), wf, params, g, _evolution_config(rc, dt))
    oracle = first_order_prediction(wf, p0, T, g, params)
    pm = peak_metrics(np.abs(final.psi2)**2, g)
    metrics = {
        "dt": dt, "p0": p0, "window": [p0, p0 + params.force * T],
        "coverage": coverage_fraction(target, p0, T, params),
        "fidelity_vs_target": fidelity(final.psi2, target, g),
        "fidelity_vs_first_order": fidelity(final.psi2, oracle, g),
        "density_l2_vs_first_order": density_l2_error(final.psi2, oracle, g),
        "excited_probability": float(rec.excited_probability[-1]),
        "norm_drift": float(abs(rec.norm[-1] / rec.norm[0] - 1)),
        "center": pm.center, "hwhm": pm.hwhm,
    }
    _si_lengths(rc, metrics, ("center", "hwhm"))
    phi = target.amplitude
    write_csv(out / "target.csv", {"z": g.z, "re_phi": phi.real, "im_phi": phi.imag,
                                   "density_phi": np.abs(phi)**2}, _echo(rc))
    write_waveform_csv(out / "waveform_target.csv", wf, _echo(rc))
    write_snapshot_csv(out / "density_target.csv", final, _echo(rc))
    write_report(out / "report.json", metrics, _echo(rc))
    return metrics


def build_comb(rc: RunConfig):
    s = rc.section
    if s["pattern"] == "double_hump":
        pattern = double_hump_pattern(s["N"] if s["N"] is not None else 63,
                                      s["dz"] if s["dz"] is not None else 3.7)
    else:
        pattern = make_from_samples(s["pattern"], "pattern")
    if s["N"] is not None and s["dz"] is not None:
        N, dz = s["N"], s["dz"]
    elif pattern.pixels is not None:
        dz, N, _ = pattern.pixels
        N = s["N"] if s["N"] is not None else N
        dz = s["dz"] if s["dz"] is not None else dz
    else:
        raise ConfigurationError("litho.N: pattern is not a pixel row; give litho.N and litho.dz")
    return pixelate(pattern, dz, N, rc.pulse["V0"])


def run_litho(rc: RunConfig, out: Path) -> dict:
    p, g, params, s = rc.pulse, rc.grid, rc.params, rc.section
    T, T_laser = p["T"], p["T_laser"]
    comb = build_comb(rc)
    _, dt = steps_for(T, step_bound(rc, comb))
    res = litho_accumulate(comb, T, T_laser, s["realizations"], rc.seed, g, params,
                           _evolution_config(rc, dt), workers=s["workers"])
    zn = comb.positions
    sm_grid = smoothed_pattern(comb, g.z, res.delta_z)
    pm = peak_metrics(res.mean_density, g)
    metrics = {"dt": dt, "realizations": res.num_realizations,
               "correlation_with_target": res.correlation_with_target,
               "q_factor": res.q_factor, "delta_z": res.delta_z,
               "delta_omega": comb.delta_omega(params), "N": comb.half_width_N,
               "pixel_dz": comb.pixel_spacing_dz, "t_in": res.t_in,
               "hwhm": pm.hwhm, "center": pm.center}
    _si_lengths(rc, metrics, ("delta_z", "hwhm", "center", "pixel_dz"))
    write_csv(out / "litho_density.csv", {"z": g.z, "mean_density": res.mean_density,
                                          "smoothed_target": sm_grid}, _echo(rc))
    write_csv(out / "litho_pixels.csv", {"z_n": zn, "sigma_n": comb.weights**2,
                                         "simulated": np.interp(zn, g.z, res.mean_density),
                                         "smoothed_target": smoothed_pattern(comb, zn, res.delta_z)},
              _echo(rc))
    write_report(out / "report.json", metrics, _echo(rc))
    return metrics


def run_width_scan(rc: RunConfig, out: Path) -> dict:
    g, params = rc.grid, rc.params
    values = rc.section["T_values"]
    cfg = _evolution_config(rc, step_bound(rc))
    ms = monochromatic_width_scan(values, rc.pulse["V_tilde"], g, params, cfg,
                                  rc.pulse["z_star"], rc.section["chirped"])
    hw = np.array([m.hwhm for m in ms])
    i = int(np.argmin(hw))
    metrics = {"T_at_min": float(values[i]), "min_hwhm": float(hw[i]),
               "hwhm_first": float(hw[0]), "hwhm_last": float(hw[-1])}
    _si_lengths(rc, metrics, ("min_hwhm", "hwhm_first", "hwhm_last"))
    write_csv(out / "width_scan.csv", {
        "T": values, "center": [m.center for m in ms], "hwhm": hw,
        "lobe_hwhm": [m.lobe_hwhm for m in ms], "peak_density": [m.peak_density for m in ms]},
        _echo(rc))
    write_report(out / "report.json", metrics, _echo(rc))
    return metrics


RUNNERS = {"Units": run_units, "DeltaPeak": run_delta_peak, "TargetState": run_target_state,
           "Litho": run_litho, "WidthScan": run_width_scan}


def _as_finding(exc: Exception) -> Finding:
    msg = str(exc)
    head, sep, rest = msg.partition(": ")
    if sep and " " not in head:
        return Finding("error", head, rest)
    return Finding("error", "config", msg)


def validate(config: dict) -> list[Finding]:
    """All problems found in ``config``; warnings do not block a run."""
    missing = missing_fields(config)
    if missing:
        return missing
    try:
        rc = resolve(config)
    except (ConfigurationError, ValueError) as exc:
        return [_as_finding(exc)]
    findings: list[Finding] = []
    if rc.scenario == "Units":
        return findings
    p, params = rc.pulse, rc.params
    try:
        if rc.scenario == "DeltaPeak":
            T = p["T"]
            p0 = _snap_p0(rc, p["p0"], findings)
            reach = params.force * T**2 / (2 * params.mass) if (
                p["compare_monochromatic"] or p["monochromatic"]) else 0.0
            findings += check_grid(rc, T, p0, p["z_star"], -2 * chirped_width(params, T), reach)
            findings += check_dt(rc)
        elif rc.scenario == "TargetState":
            target = build_target(rc)
            p0 = target_p0(rc, target, findings)
            lo, hi = target_extent(target.amplitude, rc.grid)
            findings += check_grid(rc, p["T"], p0, 0.0, lo, hi)
            findings += check_coverage(target, p0, p["T"], params, p["coverage_epsilon"])
            findings += check_dt(rc)
        elif rc.scenario == "Litho":
            comb = build_comb(rc)
            span = comb.half_width_N * comb.pixel_spacing_dz + 4 * litho_width(params, p["T_laser"])
            findings += check_grid(rc, p["T"], 0.0, 0.0, -span, span)
            findings += check_dt(rc, comb)
        elif rc.scenario == "WidthScan":
            T = float(rc.section["T_values"][-1])
            findings += check_grid(rc, T, 0.0, p["z_star"], -2 * chirped_width(params, T),
                                   params.force * T**2 / (2 * params.mass))
            findings += check_dt(rc)
    except (ConfigurationError, ValueError, OSError) as exc:
        findings.append(_as_finding(exc))
    return findings


def run(config: dict) -> tuple[int, dict]:
    """Validate, then execute.  Returns (exit code, metrics)."""
    from .errors import WraparoundError

    findings = validate(config)
    errors = [f for f in findings if f.level == "error"]
    for f in findings:
        log.log(logging.ERROR if f.level == "error" else logging.WARNING, "%s", f)
    if errors:
        return 2, {"findings": [str(f) for f in findings]}
    rc = resolve(config)
    out = output_dir(rc)
    out.mkdir(parents=True, exist_ok=True)
    try:
        metrics = RUNNERS[rc.scenario](rc, out)
    except WraparoundError as exc:
        log.error("numerical guard: %s", exc)
        return 3, {"error": str(exc)}
    except (ConfigurationError, ValueError) as exc:
        log.error("%s", _as_finding(exc))
        return 2, {"error": str(exc)}
    return 0, metrics
