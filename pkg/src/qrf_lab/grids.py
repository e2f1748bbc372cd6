"""Uniform 1D grids and subsystem descriptors.

Position grids are periodic with points x_k = (k - n/2) dx and an exactly
Fourier-dual momentum grid p_j = (j - n/2) dp, dp = 2*pi*hbar / (n dx).
Photon modes live on a strictly positive frequency axis; discrete
subsystems carry a finite list of labelled energy levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Invalid grid construction or grid/state mismatch."""


@dataclass(frozen=True)
class Grid1D:
    """Uniformly sampled coordinate axis with its Fourier-dual momentum axis."""

    n: int
    dx: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise GridError(f"grid size must be even and >= 4, got {self.n}")
        if self.dx <= 0:
            raise GridError(f"grid spacing must be positive, got {self.dx}")
        if self.hbar <= 0:
            raise GridError(f"hbar must be positive, got {self.hbar}")

    @property
    def points(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dx

    @property
    def dp(self) -> float:
        return 2.0 * np.pi * self.hbar / (self.n * self.dx)

    @property
    def momenta(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dp

    @property
    def length(self) -> float:
        return self.n * self.dx

    @property
    def half_width(self) -> float:
        return 0.5 * self.n * self.dx

    def rescaled(self, factor: float) -> "Grid1D":
        if factor <= 0:
            raise GridError(f"rescale factor must be positive, got {factor}")
        return Grid1D(self.n, self.dx * factor, self.hbar)

    def index_of(self, x0: float, tol: float = 1e-9) -> int:
        """Index of the grid point equal to x0; raises if x0 is off-grid."""
        k = x0 / self.dx + self.n // 2
        k_round = int(round(k))
        if not (0 <= k_round < self.n) or abs(k - k_round) > tol:
            raise GridError(f"{x0} is not a grid point (n={self.n}, dx={self.dx})")
        return k_round


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly positive frequency axis for one-photon mode amplitudes."""

    n: int
    domega: float
    omega_min: float

    def __post_init__(self):
        if self.n < 4:
            raise GridError(f"frequency grid needs >= 4 points, got {self.n}")
        if self.domega <= 0 or self.omega_min <= 0:
            raise GridError("frequency grid requires domega > 0 and omega_min > 0")

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_min + np.arange(self.n) * self.domega

    @property
    def omega_max(self) -> float:
        return self.omega_min + (self.n - 1) * self.domega

    def index_of(self, omega: float, tol: float = 1e-9) -> int:
        k = (omega - self.omega_min) / self.domega
        k_round = int(round(k))
        if not (0 <= k_round < self.n) or abs(k - k_round) > tol:
            raise GridError(f"{omega} is not a frequency grid point")
        return k_round


@dataclass(frozen=True)
class Subsystem:
    """A labelled tensor factor: spatial grid, photon mode axis, or level set.

    Exactly one of (grid, freq_grid, levels) is set.  Spatial subsystems carry
    a strictly positive mass; photon subsystems carry the propagation speed c
    of the dispersion relation instead of a mass.  The photon axis has one
    extra leading slot for the vacuum amplitude.
    """

    label: str
    grid: Grid1D | None = None
    mass: float | None = None
    freq_grid: FrequencyGrid | None = None
    light_speed: float | None = None
    levels: tuple[tuple[str, float], ...] | None = None

    def __post_init__(self):
        kinds = sum(x is not None for x in (self.grid, self.freq_grid, self.levels))
        if kinds != 1:
            raise GridError("subsystem must be exactly one of grid/photon/levels")
        if self.grid is not None and (self.mass is None or self.mass <= 0):
            raise GridError(f"spatial subsystem {self.label!r} needs mass > 0")
        if self.freq_grid is not None and (self.light_speed is None or self.light_speed <= 0):
            raise GridError(f"photon subsystem {self.label!r} needs light_speed > 0")
        if self.levels is not None and len(self.levels) < 1:
            raise GridError("discrete subsystem needs at least one level")

    @property
    def kind(self) -> str:
        if self.grid is not None:
            return "grid"
        if self.freq_grid is not None:
            return "photon"
        return "levels"

    @property
    def dim(self) -> int:
        if self.grid is not None:
            return self.grid.n
        if self.freq_grid is not None:
            return self.freq_grid.n + 1  # leading vacuum slot
        return len(self.levels)

    @property
    def measure(self) -> float:
        """Per-point weight of the L2 norm on this axis."""
        if self.grid is not None:
            return self.grid.dx
        return 1.0  # photon amplitudes are stored measure-weighted; levels count

    def level_index(self, name: str) -> int:
        for i, (lname, _) in enumerate(self.levels):
            if lname == name:
                return i
        raise GridError(f"unknown level {name!r} on subsystem {self.label!r}")

    def level_energies(self) -> np.ndarray:
        return np.array([e for _, e in self.levels], dtype=float)


def spatial(label: str, n: int, dx: float, mass: float, hbar: float = 1.0) -> Subsystem:
    return Subsystem(label=label, grid=Grid1D(n, dx, hbar), mass=mass)


def photon(label: str, n: int, domega: float, omega_min: float, c: float) -> Subsystem:
    return Subsystem(label=label, freq_grid=FrequencyGrid(n, domega, omega_min), light_speed=c)


def two_level(label: str, e_ground: float, e_excited: float) -> Subsystem:
    return Subsystem(label=label, levels=(("g", e_ground), ("e", e_excited)))
