"""Physical parameters, natural units, the periodic grid and the spinor state.

Everything downstream works in whatever consistent unit system the
:class:`PhysicalParams` instance is expressed in.  The canonical choice is
natural units (lengths in ``d``, times in ``tau``), obtained from
:meth:`PhysicalParams.natural`, where ``hbar = F = 1`` and ``M = 1/2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, DomainError, PreconditionError

AMU = 1.66053906660e-27  # kg
HBAR_SI = 1.054571817e-34  # J s


@dataclass(frozen=True)
class PhysicalParams:
    """Mass, gradient force and hbar in one consistent unit system.

    ``omega21_0`` is the bare transition frequency.  It is kept for the
    record only; all dynamics run in the frame rotating at it.
    """

    mass: float
    force: float
    hbar: float = 1.0
    omega21_0: float = 0.0

    def __post_init__(self):
        for name in ("mass", "force", "hbar"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be positive, got {value!r}")

    @classmethod
    def natural(cls) -> "PhysicalParams":
        """Parameters in units of d and tau: hbar = F = 1, M = 1/2."""
        return cls(mass=0.5, force=1.0, hbar=1.0)

    @classmethod
    def from_gradient_frequency(cls, mass_kg: float, hz_per_m: float,
                                hbar: float = HBAR_SI) -> "PhysicalParams":
        """Build SI parameters from a transition-frequency gradient.

        ``hz_per_m`` is the cyclic frequency gradient F/(2 pi hbar).
        """
        return cls(mass=mass_kg, force=2 * np.pi * hbar * hz_per_m, hbar=hbar)


@dataclass(frozen=True)
class NaturalUnits:
    length_d: float
    time_tau: float


def natural_units(params: PhysicalParams) -> NaturalUnits:
    """Diffraction-limited width ``d`` and the time ``tau`` it takes to reach it."""
    m, f, hbar = params.mass, params.force, params.hbar
    d = np.cbrt(hbar**2 / (2 * m * f))
    tau = np.cbrt(2 * hbar * m / f**2)
    return NaturalUnits(length_d=float(d), time_tau=float(tau))


@dataclass(frozen=True)
class Grid:
    """Uniform periodic position lattice and its DFT-conjugate momentum lattice.

    Momenta are stored in FFT order, ``p_k = 2 pi hbar k / L`` with
    ``k = 0, 1, ..., N/2 - 1, -N/2, ..., -1``.

    The transform pair is unitary,

        phi(p_k) = dz / sqrt(2 pi hbar) * sum_j psi(z_j) exp(-i p_k z_j / hbar),

    so ``sum |phi|^2 dp == sum |psi|^2 dz``.  The conventional momentum
    amplitude with a ``1/(2 pi hbar)`` prefactor equals
    ``phi / sqrt(2 pi hbar)`` (see :func:`conventional_momentum_factor`).
    """

    num_points: int
    length: float
    z_min: float
    hbar: float = 1.0

    def __post_init__(self):
        n = self.num_points
        if not isinstance(n, (int, np.integer)) or n < 2 or n & (n - 1):
            raise ConfigurationError(f"num_points must be a power of two >= 2, got {n!r}")
        if not self.length > 0:
            raise ConfigurationError(f"length must be positive, got {self.length!r}")

    @property
    def dz(self) -> float:
        return self.length / self.num_points

    @property
    def dp(self) -> float:
        return 2 * np.pi * self.hbar / self.length

    @property
    def p_max(self) -> float:
        """Nyquist momentum, pi hbar N / L."""
        return np.pi * self.hbar * self.num_points / self.length

    @cached_property
    def z(self) -> np.ndarray:
        z = self.z_min + self.dz * np.arange(self.num_points)
        z.setflags(write=False)
        return z

    @cached_property
    def p(self) -> np.ndarray:
        p = self.dp * np.fft.fftfreq(self.num_points, d=1.0 / self.num_points)
        p.setflags(write=False)
        return p

    @cached_property
    def _phase(self) -> np.ndarray:
        ph = np.exp(-1j * self.p * self.z_min / self.hbar)
        ph.setflags(write=False)
        return ph

    def to_momentum(self, psi: np.ndarray) -> np.ndarray:
        """Unitary transform to the momentum lattice (last axis)."""
        scale = self.dz / np.sqrt(2 * np.pi * self.hbar)
        return scale * self._phase * sfft.fft(psi, axis=-1)

    def to_position(self, phi: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`to_momentum`."""
        scale = self.num_points * self.dp / np.sqrt(2 * np.pi * self.hbar)
        return scale * sfft.ifft(phi * np.conj(self._phase), axis=-1)

    def on_lattice(self, p: float, rtol: float = 1e-9) -> bool:
        k = p / self.dp
        return abs(k - round(k)) <= rtol * max(1.0, abs(k))

    def snap_momentum(self, p: float) -> float:
        """Nearest momentum lattice value."""
        return round(p / self.dp) * self.dp


def make_grid(length: float, num_points: int, z_min: float | None = None,
              hbar: float = 1.0) -> Grid:
    """Grid of ``num_points`` samples over ``length``; centred on 0 by default."""
    if z_min is None:
        z_min = -0.5 * length
    return Grid(num_points=num_points, length=length, z_min=z_min, hbar=hbar)


def conventional_momentum_factor(hbar: float = 1.0) -> float:
    """Factor taking the unitary momentum amplitude to the 1/(2 pi hbar) convention."""
    return 1.0 / np.sqrt(2 * np.pi * hbar)


@dataclass
class SpinorState:
    """Ground (``psi1``) and excited (``psi2``) amplitudes on a grid."""

    grid: Grid
    psi1: np.ndarray
    psi2: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.psi1 = np.asarray(self.psi1, dtype=complex)
        self.psi2 = np.asarray(self.psi2, dtype=complex)
        n = self.grid.num_points
        if self.psi1.shape != (n,) or self.psi2.shape != (n,):
            raise ConfigurationError(
                f"psi1/psi2 must have shape ({n},), got {self.psi1.shape} and {self.psi2.shape}")

    def norm(self) -> float:
        """Total norm sum_j (|psi1|^2 + |psi2|^2) dz."""
        return float((np.vdot(self.psi1, self.psi1).real
                      + np.vdot(self.psi2, self.psi2).real) * self.grid.dz)

    def excited_norm(self) -> float:
        return float(np.vdot(self.psi2, self.psi2).real * self.grid.dz)

    def copy(self) -> "SpinorState":
        return SpinorState(self.grid, self.psi1.copy(), self.psi2.copy(), self.time)


def plane_wave_state(grid: Grid, p0: float = 0.0, rho_in: float = 1.0) -> SpinorState:
    """Ground-state plane wave ``sqrt(rho_in) exp(i p0 z / hbar)``.

    ``p0`` has to sit on the momentum lattice, otherwise the plane wave is
    not periodic on the box.
    """
    if not grid.on_lattice(p0):
        raise PreconditionError(
            f"p0={p0!r} is not on the momentum lattice (dp={grid.dp!r}); "
            f"nearest allowed value is {grid.snap_momentum(p0)!r}")
    if rho_in < 0:
        raise DomainError(f"rho_in must be non-negative, got {rho_in!r}")
    psi1 = np.sqrt(rho_in) * np.exp(1j * p0 * grid.z / grid.hbar)
    return SpinorState(grid, psi1, np.zeros(grid.num_points, complex), 0.0)
