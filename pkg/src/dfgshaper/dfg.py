"""Difference-frequency generation with a narrowband input line.

Energy conservation ``1/l_out = 1/l_in - 1/l_pump`` carries the pump spectrum
onto the output axis.  Frequency widths are preserved, so wavelength widths
compress by ``(l_out / l_pump)**2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    FWHM_PER_SIGMA,
    GaussianKernel,
    Sinc2Kernel,
    Spectrum,
    SpectralGrid,
    resample,
)

PM_SHAPES = ("gaussian", "sinc2")

# pump intensity below this fraction of the peak is not required to land on the output grid
_SUPPORT_THRESHOLD = 1e-12


@dataclass(frozen=True)
class DfgScheme:
    input_wavelength: float = 557.0
    pump_center: float = 1550.0

    def __post_init__(self):
        if not 0 < self.input_wavelength < self.pump_center:
            raise ValueError(
                "need 0 < input wavelength < pump wavelength, got "
                f"{self.input_wavelength} and {self.pump_center} nm"
            )

    @property
    def output_center(self) -> float:
        return output_center(self)

    @property
    def compression(self) -> float:
        """Output-to-pump ratio of wavelength widths at the centre wavelengths."""
        return (self.output_center / self.pump_center) ** 2

    def output_wavelength(self, pump_wavelength):
        """Output wavelength generated by each pump wavelength."""
        nu = 1.0 / self.input_wavelength - 1.0 / np.asarray(pump_wavelength, dtype=float)
        return 1.0 / nu

    def pump_wavelength(self, output_wavelength):
        """Pump wavelength that generates each output wavelength (inverse map)."""
        nu = 1.0 / self.input_wavelength - 1.0 / np.asarray(output_wavelength, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(nu > 0, 1.0 / nu, np.inf)


@dataclass(frozen=True)
class PhasematchingSpec:
    """Phasematching acceptance: FWHM in nm on the pump axis and line shape."""

    fwhm: float
    shape: str = "gaussian"

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError(f"phasematching fwhm must be positive, got {self.fwhm}")
        if self.shape not in PM_SHAPES:
            raise ValueError(f"shape must be one of {PM_SHAPES}, got {self.shape!r}")


def output_center(scheme: DfgScheme) -> float:
    nu = 1.0 / scheme.input_wavelength - 1.0 / scheme.pump_center
    if not nu > 0:
        raise ValueError("scheme produces no positive output frequency")
    return 1.0 / nu


def map_pump_to_output(
    pump: Spectrum, scheme: DfgScheme, out_grid: SpectralGrid, kind: str = "cubic"
) -> Spectrum:
    """Carry a pump-axis spectrum onto the output wavelength axis.

    Each output wavelength is generated by exactly one pump wavelength.  The
    intensity per unit frequency is the same on both sides; per unit
    wavelength it picks up the factor ``(l_pump / l_out)**2``.  Note the
    mirror: longer pump wavelengths produce shorter output wavelengths.
    """
    peak = pump.intensity.max()
    if peak > 0:
        support = pump.wavelengths[pump.intensity > _SUPPORT_THRESHOLD * peak]
        mapped = scheme.output_wavelength(support[[0, -1]])
        lo, hi = np.min(mapped), np.max(mapped)
        if lo < out_grid.low or hi > out_grid.high:
            raise ValueError(
                f"pump spectrum maps to [{lo:.4f}, {hi:.4f}] nm, beyond the output grid "
                f"[{out_grid.low:.4f}, {out_grid.high:.4f}] nm"
            )
    lam_out = out_grid.wavelengths
    lam_pump = scheme.pump_wavelength(lam_out)
    values = resample(pump.wavelengths, pump.intensity, lam_pump, kind=kind)
    with np.errstate(invalid="ignore"):
        jacobian = np.where(np.isfinite(lam_pump), (lam_pump / lam_out) ** 2, 0.0)
    return Spectrum(out_grid, values * jacobian)


def pump_envelope(center: float, fwhm: float, grid: SpectralGrid) -> Spectrum:
    """Peak-one Gaussian intensity envelope."""
    if not fwhm > 0:
        raise ValueError(f"envelope fwhm must be positive, got {fwhm}")
    sigma = fwhm / FWHM_PER_SIGMA
    x = (grid.wavelengths - center) / sigma
    return Spectrum(grid, np.exp(-0.5 * x * x))


def phasematching_kernel(spec: PhasematchingSpec, grid_spacing: float):
    """Blur kernel for the phasematching acceptance, or ``None`` when it is unresolved.

    ``spec.fwhm`` must already be expressed on the axis whose spacing is given.
    """
    if spec.fwhm < grid_spacing:
        return None
    if spec.shape == "gaussian":
        return GaussianKernel(spec.fwhm)
    return Sinc2Kernel(spec.fwhm)


def width_on_output(width_pump: float, scheme: DfgScheme) -> float:
    """Wavelength width on the output axis for a width on the pump axis (same frequency width)."""
    return width_pump * scheme.compression
