"""Simulation of a difference-frequency-generation pulse shaper.

Programmed Hermite-Gauss pump spectra are carried through a model of the
experimental imperfections and scored against the ideal output spectrum.
"""
__version__ = "0.1.0"

from .dfg import DfgScheme, PhasematchingSpec, map_pump_to_output, output_center, pump_envelope
from .estimator import DfgPulseShaper, HermiteGaussTargets
from .experiments import (
    OverlapRecord,
    find_fidelity_range,
    read_csv,
    read_json,
    sweep_bandwidth,
    sweep_phasematching,
    write_csv,
    write_json,
)
from .modes import HgTarget, hermite, hg_spectrum, overlap
from .pipeline import ModelResult, PipelineConfig, StageError, StageToggles, run_pipeline
from .spectral import GaussianKernel, Sinc2Kernel, Spectrum, SpectralGrid, ghz_to_nm, make_grid

__all__ = [
    "DfgPulseShaper", "DfgScheme", "GaussianKernel", "HermiteGaussTargets", "HgTarget",
    "ModelResult", "OverlapRecord", "PhasematchingSpec", "PipelineConfig", "Sinc2Kernel",
    "Spectrum", "SpectralGrid", "StageError", "StageToggles", "find_fidelity_range",
    "ghz_to_nm", "hermite", "hg_spectrum", "make_grid", "map_pump_to_output",
    "output_center", "overlap", "pump_envelope", "read_csv", "read_json", "run_pipeline",
    "sweep_bandwidth", "sweep_phasematching", "write_csv", "write_json",
]
