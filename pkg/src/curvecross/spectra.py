"""Photon-energy scans: absorption spectra and Raman excitation profiles.

For each photon energy the resolvent argument is z = omega + omega_0/2
+ i Gamma measured from the ground-state minimum, with each excited curve
carrying its electronic origin, so the inter-excited offset enters the
forbidden surface automatically.  Absorption takes the 1,1 block only:
the forbidden surface carries no transition dipole, so the initial and
final vibronic states have zero second component.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .coupled import CoupledBlocks
from .errors import GridMismatchError
from .model import DEFAULT_GRID, harmonic_eigenstates
from .resolvent import build_resolvent_batch

SCAN_CHUNK = 64


@dataclass(frozen=True)
class Spectrum:
    """Sampled spectrum: photon energies in cm^-1, intensity arbitrary units."""

    omega: np.ndarray
    intensity: np.ndarray
    kind: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        intensity = np.asarray(self.intensity, dtype=float)
        if omega.shape != intensity.shape or omega.ndim != 1:
            raise ValueError("omega and intensity must be matching 1-d arrays")
        if not np.all(np.diff(omega) > 0):
            raise ValueError("photon energies must be strictly increasing")
        if not np.all(np.isfinite(intensity)):
            raise ValueError("intensities must be finite")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "intensity", intensity)


def model_fingerprint(model, grid):
    """Short stable digest of the physical and numerical parameters."""
    text = repr((model, grid.x_min, grid.x_max, grid.n))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _scan_amplitudes(model, omega_grid, n_f, coupled, grid):
    """<chi_f|G11(z)|chi_i> over the photon-energy grid (chunked in z)."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    x = grid.points
    n_max = max(n_f, 0)
    states = harmonic_eigenstates(model.ground, n_max, x)
    chi_i = states[0]
    chi_f = states[n_f]
    k0 = model.coupling.strength if coupled else 0.0
    x_c = model.coupling.location
    amplitudes = np.empty(omega_grid.size, dtype=complex)
    pos = 0
    for start in range(0, omega_grid.size, SCAN_CHUNK):
        chunk = omega_grid[start : start + SCAN_CHUNK]
        zs = model.resolvent_argument(chunk)
        evs1 = build_resolvent_batch(model.allowed, zs, grid)
        if coupled:
            evs2 = build_resolvent_batch(model.forbidden, zs, grid)
        else:
            evs2 = evs1
        for ev1, ev2 in zip(evs1, evs2):
            if k0 == 0.0:
                amplitudes[pos] = ev1.matrix_element(chi_f, chi_i)
            else:
                amplitudes[pos] = CoupledBlocks(ev1, ev2, k0, x_c).g11(chi_f, chi_i).value
            pos += 1
    return amplitudes


def absorption_spectrum(model, omega_grid, coupled=True, grid=None):
    """Electronic absorption intensity Re[i <chi_i|G11(z)|chi_i>] over the
    scan; proportionality constant fixed to 1."""
    if grid is None:
        grid = DEFAULT_GRID
    amplitudes = _scan_amplitudes(model, omega_grid, 0, coupled, grid)
    intensity = np.real(1j * amplitudes)
    return Spectrum(
        omega=np.asarray(omega_grid, dtype=float),
        intensity=intensity,
        kind="absorption",
        metadata={
            "fingerprint": model_fingerprint(model, grid),
            "grid": (grid.x_min, grid.x_max, grid.n),
            "coupled": coupled,
        },
    )


def raman_profile(model, n_f, omega_grid, coupled=True, grid=None):
    """Raman excitation profile |i <chi_f|G11(z)|chi_i>|^2 into the ground
    curve's final state n_f (n_f >= 1)."""
    if n_f < 1:
        raise ValueError("the Raman final state must satisfy n_f >= 1")
    if grid is None:
        grid = DEFAULT_GRID
    amplitudes = _scan_amplitudes(model, omega_grid, n_f, coupled, grid)
    intensity = np.abs(1j * amplitudes) ** 2
    return Spectrum(
        omega=np.asarray(omega_grid, dtype=float),
        intensity=intensity,
        kind="raman",
        metadata={
            "fingerprint": model_fingerprint(model, grid),
            "grid": (grid.x_min, grid.x_max, grid.n),
            "coupled": coupled,
            "n_f": n_f,
        },
    )


def deviation_metric(coupled_spectrum, uncoupled_spectrum):
    """Integrated relative deviation D = int |I_c - I_u| / int I_u by the
    trapezoid rule; both spectra must share one omega grid."""
    a, b = coupled_spectrum, uncoupled_spectrum
    if a.omega.shape != b.omega.shape or not np.array_equal(a.omega, b.omega):
        raise GridMismatchError("spectra are sampled on different omega grids")
    num = np.trapezoid(np.abs(a.intensity - b.intensity), a.omega)
    den = np.trapezoid(b.intensity, b.omega)
    return float(num / den)


def default_scan(step=10.0):
    """The standard 9500..13500 cm^-1 window."""
    return np.arange(9500.0, 13500.0 + 0.5 * step, step)
