"""Target wavefunctions, lithography patterns and their momentum content."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Grid
from .errors import ConfigurationError, DegenerateError
from .pulse import CombSpec

# momentum_amplitude evaluates this many momenta per block
_BLOCK = 2048


@dataclass
class TargetState:
    """A normalized motional state sampled on a grid."""

    grid: Grid
    amplitude: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitude, dtype=complex)
        if a.shape != (self.grid.num_points,):
            raise ConfigurationError(
                f"target amplitude must have shape ({self.grid.num_points},), got {a.shape}")
        nrm = np.vdot(a, a).real * self.grid.dz
        if not nrm > 0 or not np.isfinite(nrm):
            raise DegenerateError("target amplitude is not normalizable")
        self.amplitude = a / np.sqrt(nrm)
        keep = np.abs(self.amplitude) > 1e-17 * np.abs(self.amplitude).max()
        self._support = np.nonzero(keep)[0]

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitude, self.amplitude).real * self.grid.dz)

    def momentum_amplitude(self, p) -> np.ndarray:
        """Unitary-convention momentum amplitude at arbitrary momenta.

        Direct (non-uniform) Fourier sum over the sampled support, so the
        result agrees with :func:`momentum_representation` on lattice points
        and interpolates between them band-limitedly.
        """
        p = np.asarray(p, dtype=float)
        flat = p.ravel()
        g = self.grid
        z = g.z[self._support]
        a = self.amplitude[self._support]
        scale = g.dz / np.sqrt(2 * np.pi * g.hbar)
        out = np.empty(flat.size, dtype=complex)
        for i in range(0, flat.size, _BLOCK):
            pb = flat[i:i + _BLOCK]
            out[i:i + _BLOCK] = np.exp(-1j * np.outer(pb, z) / g.hbar) @ a
        return (scale * out).reshape(p.shape)

    __call__ = momentum_amplitude

    def lattice_density(self) -> tuple[np.ndarray, np.ndarray, float]:
        """``(p, |phi(p)|^2, dp)`` on the grid's momentum lattice."""
        g = self.grid
        return g.p, np.abs(g.to_momentum(self.amplitude))**2, g.dp


def momentum_representation(target: TargetState, grid: Grid | None = None) -> np.ndarray:
    """Target amplitude on the momentum lattice (FFT order, unitary convention)."""
    grid = grid or target.grid
    return grid.to_momentum(target.amplitude)


def make_gaussian_target(grid: Grid, z0: float = 0.0, sigma_z: float = 4.0,
                         p_c: float = 0.0) -> TargetState:
    """Gaussian packet whose density has standard deviation ``sigma_z``.

    ``p_c`` boosts it by ``exp(i p_c z / hbar)``.
    """
    if not sigma_z > 0:
        raise ConfigurationError(f"sigma_z must be positive, got {sigma_z!r}")
    z = grid.z
    amp = np.exp(-(z - z0)**2 / (4 * sigma_z**2) + 1j * p_c * z / grid.hbar)
    return TargetState(grid, amp)


def make_double_gaussian(grid: Grid, separation: float = 16.0, sigma_z: float = 2.0,
                         center: float = 0.0, p_c: float = 0.0,
                         relative_phase: float = 0.0) -> TargetState:
    """Two equal Gaussian packets at ``center +- separation/2``."""
    if not sigma_z > 0:
        raise ConfigurationError(f"sigma_z must be positive, got {sigma_z!r}")
    z = grid.z
    half = 0.5 * separation
    amp = (np.exp(-(z - center + half)**2 / (4 * sigma_z**2))
           + np.exp(1j * relative_phase) * np.exp(-(z - center - half)**2 / (4 * sigma_z**2)))
    return TargetState(grid, amp * np.exp(1j * p_c * z / grid.hbar))


@dataclass
class LithoPattern:
    """Non-negative deposition profile, scaled to unit maximum.

    ``pixels`` holds ``(dz, N, values)`` when the samples form a symmetric
    uniform pixel row of ``2N + 1`` points.
    """

    z: np.ndarray
    density: np.ndarray
    pixels: tuple[float, int, np.ndarray] | None = None

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        s = np.asarray(self.density, dtype=float)
        if z.shape != s.shape or z.ndim != 1 or z.size == 0:
            raise ConfigurationError("pattern z and density must be equal-length 1-D arrays")
        if np.any(np.diff(z) <= 0):
            raise ConfigurationError("pattern z samples must be strictly increasing")
        if np.any(s < 0) or not np.all(np.isfinite(s)):
            raise ConfigurationError("pattern density must be finite and non-negative")
        top = s.max()
        if not top > 0:
            raise DegenerateError("pattern density is identically zero")
        self.z, self.density = z, s / top
        if self.pixels is None:
            self.pixels = _infer_pixels(self.z, self.density)

    def __call__(self, z) -> np.ndarray:
        """Linear interpolation, zero outside the sampled range."""
        return np.interp(z, self.z, self.density, left=0.0, right=0.0)

    @property
    def support(self) -> tuple[float, float]:
        nz = np.nonzero(self.density > 0)[0]
        return float(self.z[nz[0]]), float(self.z[nz[-1]])


def _infer_pixels(z, s):
    if z.size % 2 == 0 or z.size < 3:
        return None
    step = np.diff(z)
    dz = step.mean()
    half = z.size // 2
    if np.ptp(step) > 1e-9 * abs(dz) or abs(z[half]) > 1e-9 * abs(dz):
        return None
    return float(dz), int(half), s.copy()


def load_profile(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column text profile (z in units of d, value); ``#`` starts a comment."""
    data = np.loadtxt(Path(path), comments="#", ndmin=2)
    if data.shape[1] < 2:
        raise ConfigurationError(f"{path}: expected two columns, found {data.shape[1]}")
    order = np.argsort(data[:, 0], kind="stable")
    return data[order, 0], data[order, 1]


def make_from_samples(path, kind: str = "pattern", grid: Grid | None = None):
    """Load a profile file as a :class:`LithoPattern` or a :class:`TargetState`.

    For ``kind="target"`` the values are read as a real amplitude and
    interpolated linearly onto ``grid``.
    """
    z, v = load_profile(path)
    if kind == "pattern":
        return LithoPattern(z, v)
    if kind == "target":
        if grid is None:
            raise ConfigurationError("a grid is required to load a target state")
        return TargetState(grid, np.interp(grid.z, z, v, left=0.0, right=0.0))
    raise ConfigurationError(f"unknown profile kind {kind!r}")


def pixelate(pattern: LithoPattern, dz: float, N: int, V0: float = 1.0) -> CombSpec:
    """Comb weights ``sqrt(sigma(n dz))`` for ``n = -N..N``."""
    if not dz > 0 or N < 0:
        raise ConfigurationError(f"need dz > 0 and N >= 0, got dz={dz!r}, N={N!r}")
    lo, hi = pattern.support
    edge = N * dz * (1 + 1e-9) + 1e-12
    if lo < -edge or hi > edge:
        raise ConfigurationError(
            f"pattern support [{lo:g}, {hi:g}] exceeds the pixel span [-{N * dz:g}, {N * dz:g}]")
    zn = dz * np.arange(-N, N + 1)
    return CombSpec(N, dz, np.sqrt(pattern(zn)), V0)


def double_hump_pattern(N: int = 63, dz: float = 3.7) -> LithoPattern:
    """Smooth two-hump profile on ``2N + 1`` pixels, zero at the outermost pixels."""
    z = dz * np.arange(-N, N + 1)
    span = N * dz
    s = (0.55 * np.exp(-((z + 0.42 * span) / (0.17 * span))**2)
         + np.exp(-((z - 0.18 * span) / (0.26 * span))**2))
    # taper to exactly zero at the pixel row ends
    s *= np.cos(0.5 * np.pi * z / span)**2
    return LithoPattern(z, s)


def shipped_pattern_path() -> Path:
    return Path(__file__).with_name("data") / "double_hump.txt"
