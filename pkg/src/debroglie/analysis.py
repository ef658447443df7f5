"""First-order oracles, peak metrics, lithography ensembles and resolution estimates."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .core import Grid, PhysicalParams, plane_wave_state
from .errors import DegenerateError, PreconditionError
from .propagator import EvolutionConfig, evolve
from .pulse import (CombSpec, Scheme, PulseWaveform, chirp_phase, steps_for,
                    synthesize_chirped_delta, synthesize_litho_comb,
                    synthesize_monochromatic)
from .targets import TargetState

_BLOCK = 1024


def sinc2_half_max_root() -> float:
    """x > 0 with (sin x / x)^2 = 1/2, about 1.39156."""
    return brentq(lambda x: (math.sin(x) / x)**2 - 0.5, 1.0, 2.0, xtol=1e-15)


def chirped_width(params: PhysicalParams, T: float) -> float:
    """Sinc width parameter 2 hbar / (F T) of the chirped single peak."""
    return 2 * params.hbar / (params.force * T)


def litho_width(params: PhysicalParams, T_laser: float) -> float:
    """Gaussian deposition width sqrt(pi) hbar / (F T_laser)."""
    return math.sqrt(math.pi) * params.hbar / (params.force * T_laser)


def first_order_prediction(waveform: PulseWaveform, p0: float, T: float, grid: Grid,
                           params: PhysicalParams, rho_in: float = 1.0) -> np.ndarray:
    """Excited amplitude at time ``T`` to first order in the drive.

    A ground-state plane wave of momentum ``p0`` is promoted at time ``t``
    and then accelerates freely, arriving at ``T`` with momentum
    ``p = p0 + F (T - t)``.  With the drive written as envelope times the
    ``z_star = 0`` chirp, all dynamical phases cancel and

        psi2(z) = -(i / hbar F) e^{i Phi0} sqrt(rho_in)
                  * int_{p0}^{p0 + F T} dp  E(t(p)) exp(i p z / hbar),

    evaluated here as a midpoint sum over the waveform samples.
    """
    if waveform.scheme not in (Scheme.CHIRPED_DELTA, Scheme.CHIRPED_TARGET):
        raise PreconditionError(
            f"first-order prediction needs a chirped waveform, got {waveform.scheme.value}")
    m, f, hbar = params.mass, params.force, params.hbar
    t = waveform.times
    envelope = waveform.samples * np.exp(1j * chirp_phase(t, p0, 0.0, T, params))
    p = p0 + f * (T - t)
    phi0 = -chirp_phase(T, p0, 0.0, T, params) - p0**2 * T / (2 * m * hbar)
    z = grid.z
    acc = np.zeros(z.size, dtype=complex)
    for i in range(0, t.size, _BLOCK):
        acc += envelope[i:i + _BLOCK] @ np.exp(1j * np.outer(p[i:i + _BLOCK], z) / hbar)
    return (-1j / hbar) * np.sqrt(rho_in) * np.exp(1j * phi0) * waveform.dt * acc


@dataclass(frozen=True)
class PeakMetrics:
    """Peak location and widths of a density profile.

    ``hwhm`` is half the distance between the outermost half-maximum
    crossings; ``lobe_hwhm`` uses the crossings adjacent to the maximum.
    They coincide for single-lobed peaks (sinc^2, Gaussian) and differ for
    fringed distributions, where ``lobe_hwhm`` measures one fringe.
    """

    center: float
    hwhm: float
    peak_density: float
    lobe_hwhm: float


def _crossing(z0, d0, z1, d1, level):
    return z0 + (level - d0) * (z1 - z0) / (d1 - d0)


def peak_metrics(density, grid: Grid) -> PeakMetrics:
    d = np.asarray(density, dtype=float)
    if d.shape != (grid.num_points,):
        raise PreconditionError("density must be sampled on the grid")
    if not d.max() > 0:
        raise DegenerateError("density is identically zero")
    z, dz, n = grid.z, grid.dz, d.size
    i = int(np.argmax(d))
    center = z[i]
    if 0 < i < n - 1:
        den = d[i - 1] - 2 * d[i] + d[i + 1]
        if den < 0:
            center += 0.5 * dz * (d[i - 1] - d[i + 1]) / den
    half = 0.5 * d[i]

    def right_of(j):
        while j < n - 1 and d[j + 1] >= half:
            j += 1
        return z[-1] if j == n - 1 else _crossing(z[j], d[j], z[j + 1], d[j + 1], half)

    def left_of(j):
        while j > 0 and d[j - 1] >= half:
            j -= 1
        return z[0] if j == 0 else _crossing(z[j - 1], d[j - 1], z[j], d[j], half)

    lobe = 0.5 * (right_of(i) - left_of(i))
    above = np.nonzero(d >= half)[0]
    outer = 0.5 * (right_of(int(above[-1])) - left_of(int(above[0])))
    return PeakMetrics(float(center), float(outer), float(d[i]), float(lobe))


def fidelity(psi2, target, grid: Grid) -> float:
    """Normalized overlap ``|<phi|psi>|^2 / (<phi|phi><psi|psi>)``."""
    phi = target.amplitude if isinstance(target, TargetState) else np.asarray(target, complex)
    psi = np.asarray(psi2, dtype=complex)
    nphi = np.vdot(phi, phi).real
    npsi = np.vdot(psi, psi).real
    if nphi == 0 or npsi == 0:
        raise DegenerateError("fidelity of a zero-norm state is undefined")
    return float(min(1.0, abs(np.vdot(phi, psi))**2 / (nphi * npsi)))


def density_l2_error(psi, reference, grid: Grid) -> float:
    """Relative L2 distance between the densities of the unit-normalized states."""
    a = np.abs(np.asarray(psi, complex))**2
    b = np.abs(np.asarray(reference, complex))**2
    a = a / (a.sum() * grid.dz)
    b = b / (b.sum() * grid.dz)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def q_function(zeta: float) -> float:
    """``sum_n exp(-n^2 / (2 zeta^2))`` over all integers, terms below 1e-16 dropped."""
    if zeta < 0:
        raise PreconditionError("zeta must be >= 0")
    if zeta == 0:
        return 1.0
    n_max = int(math.ceil(zeta * math.sqrt(2 * math.log(1e16)))) + 1
    n = np.arange(1, n_max + 1)
    return float(1.0 + 2.0 * np.sum(np.exp(-n**2 / (2 * zeta**2))))


def beam_resolution_limits(dvx: float, dvz: float, dvy: float, mean_vx: float, T: float,
                           k_laser: float, params: PhysicalParams) -> tuple[float, float, float]:
    """Blur from longitudinal, transverse-z and transverse-y velocity spreads.

    The third entry converts the Doppler shift ``k dvy`` into a position
    offset through the gradient, ``hbar k dvy / F``.
    """
    if not mean_vx > 0:
        raise PreconditionError("mean_vx must be positive")
    m, f = params.mass, params.force
    return (f * T**2 / m * (dvx / mean_vx),
            dvz * T,
            k_laser * params.hbar * dvy / f)


def monochromatic_width_scan(T_values, V_tilde: float, grid: Grid, params: PhysicalParams,
                             config: EvolutionConfig, z_star: float = 0.0,
                             chirped: bool = False) -> list[PeakMetrics]:
    """Peak metrics of the excited density after a drive of each duration in ``T_values``.

    ``config.dt`` is an upper bound; each run uses the largest step that
    divides its ``T``.
    """
    T_values = np.asarray(T_values, dtype=float)
    if np.any(np.diff(T_values) < 0):
        raise PreconditionError("T_values must be sorted ascending")
    out = []
    for T in T_values:
        _, dt = steps_for(T, config.dt)
        if chirped:
            wf = synthesize_chirped_delta(V_tilde, 0.0, z_star, T, dt, params)
        else:
            wf = synthesize_monochromatic(V_tilde, z_star, T, dt, params)
        final, _ = evolve(plane_wave_state(grid), wf, params, grid, replace(config, dt=dt))
        out.append(peak_metrics(np.abs(final.psi2)**2, grid))
    return out


@dataclass
class LithoResult:
    z: np.ndarray
    mean_density: np.ndarray
    num_realizations: int
    correlation_with_target: float
    q_factor: float
    t_in: np.ndarray
    delta_z: float
    meta: dict = field(default_factory=dict)


def litho_single(comb: CombSpec, T: float, T_laser: float, t_in: float, grid: Grid,
                 params: PhysicalParams, config: EvolutionConfig) -> np.ndarray:
    """Excited density at ``T`` for one atom entering at ``t_in``."""
    wf = synthesize_litho_comb(comb, T, T_laser, config.dt, params, t_in=t_in)
    final, _ = evolve(plane_wave_state(grid), wf, params, grid, config)
    return np.abs(final.psi2)**2


def _litho_job(args):
    return litho_single(*args)


def smoothed_pattern(comb: CombSpec, z, delta_z: float) -> np.ndarray:
    """``sum_m sigma(z_m) exp(-(z - z_m)^2 / (2 delta_z^2))``."""
    z = np.asarray(z, dtype=float)
    sigma = comb.weights**2
    out = np.zeros(z.shape)
    for zm, s in zip(comb.positions, sigma):
        out += s * np.exp(-(z - zm)**2 / (2 * delta_z**2))
    return out


def litho_entering_times(comb: CombSpec, num_realizations: int, seed: int,
                         params: PhysicalParams) -> np.ndarray:
    """Entering times uniform on one comb period, one child seed per realization."""
    period = comb.period(params)
    children = np.random.SeedSequence(seed).spawn(num_realizations)
    return np.array([np.random.default_rng(c).uniform(0.0, period) for c in children])


def litho_accumulate(comb: CombSpec, T: float, T_laser: float, num_realizations: int,
                     seed: int, grid: Grid, params: PhysicalParams, config: EvolutionConfig,
                     workers: int = 1, **meta) -> LithoResult:
    """Average the deposited excited density over random entering times.

    Realizations are independent; with ``workers > 1`` they run in a process
    pool.  Entering times depend only on ``seed`` and the reduction runs in
    realization order, so the result does not depend on ``workers``.
    """
    if num_realizations < 1:
        raise PreconditionError("num_realizations must be >= 1")
    t_in = litho_entering_times(comb, num_realizations, seed, params)
    jobs = [(comb, T, T_laser, float(t), grid, params, config) for t in t_in]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            densities = list(pool.map(_litho_job, jobs))
    else:
        densities = [_litho_job(j) for j in jobs]
    total = np.zeros(grid.num_points)
    for d in densities:
        total += d
    mean = total / num_realizations

    dzl = litho_width(params, T_laser)
    if comb.half_width_N > 0:
        zn = comb.positions
        sim = np.interp(zn, grid.z, mean)
        ref = smoothed_pattern(comb, zn, dzl)
        corr = float(np.corrcoef(sim, ref)[0, 1])
    else:
        corr = float("nan")
    return LithoResult(grid.z.copy(), mean, num_realizations, corr,
                       q_function(dzl / comb.pixel_spacing_dz), t_in, dzl, dict(meta))
