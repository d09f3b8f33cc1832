"""Delta-coupled two-surface curve-crossing spectra.

Absorption spectra and resonance Raman excitation profiles for a model of
one dipole-allowed harmonic excited surface crossing a dipole-forbidden
dissociative surface, coupled at a single point.  The coupled Green's
function is assembled exactly from single-surface resolvents and
cross-validated by a time-domain wavepacket propagation.
"""

__version__ = "0.1.0"

from .model import (
    DEFAULT_GRID,
    DeltaCoupling,
    Grid,
    HarmonicCurve,
    MorseCurve,
    TwoStateModel,
    VibrationalState,
    find_crossing,
    franck_condon_matrix,
    franck_condon_overlap,
    harmonic_eigenstate,
    harmonic_eigenstates,
    huang_rhys_factor,
)
from .resolvent import (
    HarmonicSpectralSum,
    ResolventEvaluator,
    build_resolvent,
    build_resolvent_batch,
)
from .coupled import (
    CoupledAmplitude,
    CoupledBlocks,
    coupled_full_matrix,
    coupled_g11_element,
    coupled_g12_element,
)
from .spectra import Spectrum, absorption_spectrum, deviation_metric, raman_profile
from . import units

__all__ = [
    "DEFAULT_GRID",
    "DeltaCoupling",
    "Grid",
    "HarmonicCurve",
    "MorseCurve",
    "TwoStateModel",
    "VibrationalState",
    "find_crossing",
    "franck_condon_matrix",
    "franck_condon_overlap",
    "harmonic_eigenstate",
    "harmonic_eigenstates",
    "huang_rhys_factor",
    "HarmonicSpectralSum",
    "ResolventEvaluator",
    "build_resolvent",
    "build_resolvent_batch",
    "CoupledAmplitude",
    "CoupledBlocks",
    "coupled_full_matrix",
    "coupled_g11_element",
    "coupled_g12_element",
    "Spectrum",
    "absorption_spectrum",
    "deviation_metric",
    "raman_profile",
    "units",
]
