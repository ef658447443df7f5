"""Drive synthesis: monochromatic reference, chirped pulses and the lithography comb.

All waveforms are complex amplitudes in the frame rotating at the bare
transition frequency (plus recoil shift), sampled once per propagator step
at the interval midpoints ``t_n = t_start + (n + 1/2) dt``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid

from .core import PhysicalParams
from .errors import ConfigurationError, DegenerateError, DomainError, PreconditionError

ArrayFn = Callable[[np.ndarray], np.ndarray]


class Scheme(enum.Enum):
    MONOCHROMATIC = "Monochromatic"
    CHIRPED_DELTA = "ChirpedDelta"
    CHIRPED_TARGET = "ChirpedTarget"
    LITHO_COMB = "LithoComb"


@dataclass
class PulseWaveform:
    """Sampled drive ``V(t_n)`` plus what was used to build it.

    ``envelope`` and ``carrier`` split the drive into the part evaluated in
    lab time (shifted by an entering time, see :func:`time_shift`) and the
    part tied to the atom's own clock.  ``samples == envelope(t) * carrier(t)``.
    """

    samples: np.ndarray
    dt: float
    t_start: float
    scheme: Scheme
    meta: dict = field(default_factory=dict)
    envelope: ArrayFn | None = field(default=None, repr=False, compare=False)
    carrier: ArrayFn | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ConfigurationError("waveform needs a non-empty 1-D sample array")
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt!r}")

    @property
    def num_steps(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.num_steps * self.dt

    @property
    def times(self) -> np.ndarray:
        """Midpoint sample times."""
        return self.t_start + (np.arange(self.num_steps) + 0.5) * self.dt


@dataclass(frozen=True)
class CombSpec:
    """One tone per pattern pixel ``z_n = n * dz`` with weight ``sqrt(sigma(z_n))``."""

    half_width_N: int
    pixel_spacing_dz: float
    weights: np.ndarray
    base_amplitude_V0: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if self.half_width_N < 0:
            raise ConfigurationError("half_width_N must be >= 0")
        if w.shape != (2 * self.half_width_N + 1,):
            raise ConfigurationError(
                f"weights must have length 2N+1 = {2 * self.half_width_N + 1}, got {w.size}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ConfigurationError("comb weights must be finite and non-negative")
        if not self.pixel_spacing_dz > 0:
            raise ConfigurationError("pixel_spacing_dz must be positive")
        object.__setattr__(self, "weights", w)

    @property
    def positions(self) -> np.ndarray:
        n = np.arange(-self.half_width_N, self.half_width_N + 1)
        return n * self.pixel_spacing_dz

    def delta_omega(self, params: PhysicalParams) -> float:
        """Tone spacing F dz / hbar."""
        return params.force * self.pixel_spacing_dz / params.hbar

    def period(self, params: PhysicalParams) -> float:
        return 2 * np.pi / self.delta_omega(params)


def source_trajectory(t, p0: float, z_star: float, T: float, params: PhysicalParams):
    """Emission point whose atoms (momentum ``p0`` at birth) all reach ``z_star`` at ``T``."""
    u = T - np.asarray(t, dtype=float)
    return z_star - p0 * u / params.mass - params.force * u**2 / (2 * params.mass)


def chirp_phase(t, p0: float, z_star: float, T: float, params: PhysicalParams):
    """Closed-form rotating-frame phase ``-(F/hbar) * int_0^t z_s(t') dt'``."""
    t = np.asarray(t, dtype=float)
    m, f, hbar = params.mass, params.force, params.hbar
    integral = (z_star * t
                - (p0 / m) * (T * t - 0.5 * t**2)
                - (f / (2 * m)) * (T**3 - (T - t)**3) / 3.0)
    return -(f / hbar) * integral


def _num_steps(T: float, dt: float) -> int:
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt!r}")
    if not T > 0:
        raise ConfigurationError(f"T must be positive, got {T!r}")
    n = int(round(T / dt))
    if n < 1 or abs(n * dt - T) > 1e-9 * T:
        raise ConfigurationError(f"dt={dt!r} does not divide T={T!r}")
    return n


def steps_for(T: float, dt_max: float) -> tuple[int, float]:
    """Smallest step count with ``dt <= dt_max`` that divides ``T`` exactly."""
    n = max(1, int(np.ceil(T / dt_max - 1e-12)))
    return n, T / n


def _build(scheme, T, dt, envelope, carrier, meta, t_start=0.0) -> PulseWaveform:
    n = _num_steps(T, dt)
    t = t_start + (np.arange(n) + 0.5) * dt
    samples = envelope(t) * carrier(t)
    return PulseWaveform(samples, dt, t_start, scheme, meta, envelope, carrier)


def synthesize_chirped_delta(V_tilde: float, p0: float, z_star: float, T: float,
                             dt: float, params: PhysicalParams) -> PulseWaveform:
    """Constant-amplitude drive chirped along the source trajectory."""
    if V_tilde < 0:
        raise DomainError("V_tilde must be >= 0")

    def envelope(t):
        return np.full(np.shape(t), V_tilde, dtype=complex)

    def carrier(t):
        return np.exp(-1j * chirp_phase(t, p0, z_star, T, params))

    meta = {"V_tilde": V_tilde, "p0": p0, "z_star": z_star, "T": T}
    return _build(Scheme.CHIRPED_DELTA, T, dt, envelope, carrier, meta)


def synthesize_monochromatic(V_tilde: float, z_star: float, T: float, dt: float,
                             params: PhysicalParams) -> PulseWaveform:
    """Fixed-frequency drive resonant with the transition at ``z_star``."""
    if V_tilde < 0:
        raise DomainError("V_tilde must be >= 0")
    omega = params.force * z_star / params.hbar

    def envelope(t):
        return V_tilde * np.exp(1j * omega * np.asarray(t, dtype=float))

    def carrier(t):
        return np.ones(np.shape(t), dtype=complex)

    meta = {"V_tilde": V_tilde, "z_star": z_star, "T": T}
    return _build(Scheme.MONOCHROMATIC, T, dt, envelope, carrier, meta)


def synthesize_target_pulse(target_momentum_amp: ArrayFn, p0: float, T: float, dt: float,
                            peak_rabi: float, params: PhysicalParams) -> PulseWaveform:
    """Chirped drive whose envelope traces the target's momentum amplitude.

    The sample at time ``t`` carries ``phi(p0 + F (T - t))``; the overall
    scale is fixed so that the largest sample magnitude equals ``peak_rabi``.

    Parameters
    ----------
    target_momentum_amp : callable
        Vectorised ``p -> phi(p)``.
    p0 : float
        Initial momentum; the addressable window is ``[p0, p0 + F T]``.
    peak_rabi : float
        Largest drive amplitude, in energy units.
    """
    f = params.force
    n = _num_steps(T, dt)
    t = (np.arange(n) + 0.5) * dt
    raw = np.asarray(target_momentum_amp(p0 + f * (T - t)), dtype=complex)
    peak = np.max(np.abs(raw))
    if not peak > 0:
        raise DegenerateError("target momentum amplitude vanishes on the whole window")
    scale = peak_rabi / peak

    def envelope(tt):
        tt = np.asarray(tt, dtype=float)
        return scale * np.asarray(target_momentum_amp(p0 + f * (T - tt)), dtype=complex)

    def carrier(tt):
        return np.exp(-1j * chirp_phase(tt, p0, 0.0, T, params))

    meta = {"p0": p0, "T": T, "z_star": 0.0, "peak_rabi": peak_rabi,
            "window": (p0, p0 + f * T), "scale": scale}
    return _build(Scheme.CHIRPED_TARGET, T, dt, envelope, carrier, meta)


def coverage_fraction(target_momentum_amp: ArrayFn, p0: float, T: float,
                      params: PhysicalParams, reference: tuple[float, float] | None = None,
                      points: int = 1 << 16) -> float:
    """Fraction of ``int |phi(p)|^2 dp`` that falls inside ``[p0, p0 + F T]``.

    The total is taken over ``reference``, which defaults to the window
    widened by ten window widths on each side.  Objects exposing
    ``lattice_density()`` (sampled targets) are integrated on their own
    momentum lattice instead.
    """
    width = params.force * T
    lo, hi = p0, p0 + width
    lattice = getattr(target_momentum_amp, "lattice_density", None)
    if lattice is not None and reference is None:
        # sampled targets: their transform is periodic, so use one Brillouin zone
        p, dens, dp = lattice()
        total = dens.sum() * dp
        if not total > 0:
            raise DegenerateError("target momentum amplitude is identically zero")
        return float(dens[(p >= lo) & (p <= hi)].sum() * dp / total)
    if reference is None:
        reference = (lo - 10 * width, hi + 10 * width)
    p = np.linspace(reference[0], reference[1], points)
    dens = np.abs(np.asarray(target_momentum_amp(p), dtype=complex))**2
    total = trapezoid(dens, p)
    if not total > 0:
        raise DegenerateError("target momentum amplitude is zero on the reference support")
    # integrate the window on its own fine lattice so its edges are exact
    pw = np.linspace(lo, hi, max(3, int(points * width / (reference[1] - reference[0]))) | 1)
    inside = trapezoid(np.abs(np.asarray(target_momentum_amp(pw), dtype=complex))**2, pw)
    return float(inside / total)


def coverage_check(target_momentum_amp: ArrayFn, p0: float, T: float, params: PhysicalParams,
                   epsilon: float = 1e-4, reference: tuple[float, float] | None = None) -> bool:
    """True when at least ``1 - epsilon`` of the momentum weight lies in the window."""
    if not 0 < epsilon < 1:
        raise PreconditionError(f"epsilon must be in (0, 1), got {epsilon!r}")
    return coverage_fraction(target_momentum_amp, p0, T, params, reference) >= 1 - epsilon


def comb_factor(t, comb: CombSpec, params: PhysicalParams) -> np.ndarray:
    """``V0 * sum_m w_m exp(+i F z_m t / hbar)``, the tone sum before envelope and chirp."""
    t = np.asarray(t, dtype=float)
    omega = params.force * comb.positions / params.hbar
    out = np.zeros(t.shape, dtype=complex)
    # explicit loop keeps memory flat for long records; 2N+1 is at most a few hundred
    for w, om in zip(comb.weights, omega):
        if w:
            out += w * np.exp(1j * om * t)
    return comb.base_amplitude_V0 * out


def gaussian_gate(t, T: float, T_laser: float):
    """Beam-crossing envelope ``exp(-pi (t - T/2)^2 / T_laser^2)``."""
    t = np.asarray(t, dtype=float)
    return np.exp(-np.pi * (t - 0.5 * T)**2 / T_laser**2)


def synthesize_litho_comb(comb: CombSpec, T: float, T_laser: float, dt: float,
                          params: PhysicalParams, t_in: float = 0.0) -> PulseWaveform:
    """Comb of tones under the Gaussian beam envelope, chirped for ``p0 = 0``.

    ``t_in`` is the atom's entering time; only the comb factor sees it.
    """
    if not T_laser > 0:
        raise ConfigurationError(f"T_laser must be positive, got {T_laser!r}")

    def envelope(t):
        return comb_factor(t, comb, params)

    def carrier(t):
        return gaussian_gate(t, T, T_laser) * np.exp(-1j * chirp_phase(t, 0.0, 0.0, T, params))

    meta = {"T": T, "T_laser": T_laser, "p0": 0.0, "z_star": 0.0, "comb": comb, "t_in": 0.0}
    wf = _build(Scheme.LITHO_COMB, T, dt, envelope, carrier, meta)
    return time_shift(wf, t_in) if t_in else wf


def time_shift(waveform: PulseWaveform, t_in: float) -> PulseWaveform:
    """Re-sample as ``envelope(t + t_in) * carrier(t)``.

    The carrier (chirp, beam envelope) stays on the atom's clock.
    """
    if t_in == 0:
        return waveform
    if waveform.envelope is None or waveform.carrier is None:
        raise PreconditionError("waveform was not built by a synthesizer; cannot shift it")
    env, car = waveform.envelope, waveform.carrier
    t = waveform.times
    meta = dict(waveform.meta)
    meta["t_in"] = meta.get("t_in", 0.0) + t_in

    def shifted(tt):
        return env(np.asarray(tt, dtype=float) + t_in)

    return PulseWaveform(shifted(t) * car(t), waveform.dt, waveform.t_start, waveform.scheme,
                         meta, shifted, car)


def instantaneous_frequency(waveform: PulseWaveform) -> np.ndarray:
    """``-d(arg V)/dt`` by central differences at the interior samples."""
    phase = np.unwrap(np.angle(waveform.samples))
    return -np.gradient(phase, waveform.dt)
