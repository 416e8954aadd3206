"""Uniform wavelength grids, intensity spectra and the linear operations on them.

Everything here is a pure function over immutable values.  Wavelengths are in
nanometres, frequencies in GHz.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import make_interp_spline
from scipy.optimize import brentq
from scipy.signal import fftconvolve

SPEED_OF_LIGHT = 299_792_458.0  # m/s
FWHM_PER_SIGMA = 2.0 * np.sqrt(2.0 * np.log(2.0))

# Gaussian tails are cut where they fall below ~1e-14 of the peak.
_GAUSS_HALF_WIDTH_SIGMAS = 8.0
_SINC2_SIDELOBES = 20
# np.sinc(u)**2 == 1/2
_SINC2_HALF_MAX = brentq(lambda u: np.sinc(u) ** 2 - 0.5, 0.1, 0.9, xtol=1e-15)


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform wavelength axis ``center - span/2 ... center + span/2``."""

    center: float
    span: float
    num_points: int

    def __post_init__(self):
        if int(self.num_points) != self.num_points or self.num_points < 2:
            raise ValueError(f"num_points must be an integer >= 2, got {self.num_points}")
        if not np.isfinite(self.span) or self.span <= 0:
            raise ValueError(f"span must be positive, got {self.span}")
        if not np.isfinite(self.center) or self.center - self.span / 2 <= 0:
            raise ValueError(
                f"grid {self.center} +/- {self.span / 2} nm reaches nonpositive wavelengths"
            )
        object.__setattr__(self, "num_points", int(self.num_points))

    @property
    def spacing(self) -> float:
        return self.span / (self.num_points - 1)

    @property
    def low(self) -> float:
        return self.center - self.span / 2

    @property
    def high(self) -> float:
        return self.center + self.span / 2

    @cached_property
    def offsets(self) -> np.ndarray:
        """Sample positions relative to ``center``; exactly antisymmetric."""
        idx = np.arange(self.num_points) - (self.num_points - 1) / 2
        out = idx * self.spacing
        out.setflags(write=False)
        return out

    @cached_property
    def wavelengths(self) -> np.ndarray:
        out = self.center + self.offsets
        out.setflags(write=False)
        return out

    def __len__(self):
        return self.num_points


def make_grid(center: float, span: float, num_points: int) -> SpectralGrid:
    """Build a grid of ``num_points`` samples spread evenly over ``span`` nm."""
    return SpectralGrid(float(center), float(span), num_points)


def grid_from_step(center: float, span: float, step: float) -> SpectralGrid:
    """Grid covering ``span`` with spacing as close to ``step`` as the span allows."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    return make_grid(center, span, int(round(span / step)) + 1)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Nonnegative intensity samples on a :class:`SpectralGrid`."""

    grid: SpectralGrid
    intensity: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.intensity, dtype=float)
        if values.shape != (self.grid.num_points,):
            raise ValueError(
                f"intensity has shape {values.shape}, grid has {self.grid.num_points} points"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("intensity contains non-finite values")
        if np.any(values < 0):
            raise ValueError("intensity must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "intensity", values)

    @property
    def wavelengths(self) -> np.ndarray:
        return self.grid.wavelengths

    def __add__(self, other: "Spectrum") -> "Spectrum":
        _check_same_grid(self, other)
        return Spectrum(self.grid, self.intensity + other.intensity)

    def __mul__(self, factor: float) -> "Spectrum":
        return Spectrum(self.grid, self.intensity * float(factor))

    __rmul__ = __mul__


@dataclass(frozen=True)
class GaussianKernel:
    """Area-normalised Gaussian line shape of the given FWHM (nm)."""

    fwhm: float

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError(f"kernel fwhm must be positive, got {self.fwhm}")

    @property
    def sigma(self) -> float:
        return self.fwhm / FWHM_PER_SIGMA

    def sample(self, spacing: float) -> np.ndarray:
        half = int(np.ceil(_GAUSS_HALF_WIDTH_SIGMAS * self.sigma / spacing))
        x = np.arange(-half, half + 1) * spacing
        taps = np.exp(-0.5 * (x / self.sigma) ** 2)
        return taps / taps.sum()


@dataclass(frozen=True)
class Sinc2Kernel:
    """Area-normalised sinc^2 line shape whose main lobe has the given FWHM (nm)."""

    fwhm: float

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError(f"kernel fwhm must be positive, got {self.fwhm}")

    @property
    def first_zero(self) -> float:
        return self.fwhm / (2.0 * _SINC2_HALF_MAX)

    def sample(self, spacing: float) -> np.ndarray:
        half = int(np.ceil(_SINC2_SIDELOBES * self.first_zero / spacing))
        x = np.arange(-half, half + 1) * spacing
        taps = np.sinc(x / self.first_zero) ** 2
        return taps / taps.sum()


Kernel = Union[GaussianKernel, Sinc2Kernel]


def ghz_to_nm(delta_nu: float, carrier: float) -> float:
    """Convert a frequency width in GHz to a wavelength width in nm at ``carrier`` nm."""
    if carrier <= 0:
        raise ValueError(f"carrier wavelength must be positive, got {carrier}")
    if delta_nu < 0:
        raise ValueError(f"frequency width must be nonnegative, got {delta_nu}")
    # lambda^2 * dnu / c with lambda in m, dnu in Hz, result back in nm
    return (carrier * 1e-9) ** 2 * (delta_nu * 1e9) / SPEED_OF_LIGHT * 1e9


def nm_to_ghz(delta_lambda: float, carrier: float) -> float:
    if carrier <= 0:
        raise ValueError(f"carrier wavelength must be positive, got {carrier}")
    return SPEED_OF_LIGHT * (delta_lambda * 1e-9) / (carrier * 1e-9) ** 2 * 1e-9


def _check_same_grid(a: Spectrum, b: Spectrum):
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


def convolve(spectrum: Spectrum, kernel: Kernel | None, method: str = "fft") -> Spectrum:
    """Convolve with an area-normalised kernel, zero-padded at the grid edges.

    Kernels narrower than one grid step (and ``None``) leave the spectrum
    untouched.  ``method`` selects ``"fft"`` or the O(N*M) ``"direct"`` sum.
    """
    grid = spectrum.grid
    if kernel is None or kernel.fwhm < grid.spacing:
        return spectrum
    if kernel.fwhm > grid.span:
        raise ValueError(f"kernel fwhm {kernel.fwhm} nm exceeds grid span {grid.span} nm")
    taps = kernel.sample(grid.spacing)
    half = (taps.size - 1) // 2
    if method == "fft":
        full = fftconvolve(spectrum.intensity, taps, mode="full")
    elif method == "direct":
        full = np.convolve(spectrum.intensity, taps, mode="full")
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    out = full[half : half + grid.num_points]
    # FFT round-off can leave tiny negative values
    return Spectrum(grid, np.maximum(out, 0.0))


def multiply(a: Spectrum, b: Spectrum) -> Spectrum:
    _check_same_grid(a, b)
    return Spectrum(a.grid, a.intensity * b.intensity)


def window(spectrum: Spectrum, low: float, high: float) -> Spectrum:
    """Zero every sample outside the closed interval ``[low, high]``."""
    if not low < high:
        raise ValueError(f"window needs low < high, got [{low}, {high}]")
    lam = spectrum.wavelengths
    keep = (lam >= low) & (lam <= high)
    return Spectrum(spectrum.grid, np.where(keep, spectrum.intensity, 0.0))


def resample(
    x: np.ndarray, y: np.ndarray, x_new: np.ndarray, kind: str = "cubic"
) -> np.ndarray:
    """Interpolate samples ``y(x)`` at ``x_new``; zero outside ``[x[0], x[-1]]``.

    ``"cubic"`` is a not-a-knot cubic spline with undershoot clipped at zero,
    ``"linear"`` is plain piecewise-linear interpolation.
    """
    x_new = np.asarray(x_new, dtype=float)
    inside = (x_new >= x[0]) & (x_new <= x[-1])
    out = np.zeros_like(x_new)
    if kind == "linear":
        out[inside] = np.interp(x_new[inside], x, y)
    elif kind == "cubic":
        out[inside] = make_interp_spline(x, y, k=3)(x_new[inside])
    else:
        raise ValueError(f"unknown interpolation kind {kind!r}")
    return np.maximum(out, 0.0)


def shift(spectrum: Spectrum, delta: float, kind: str = "cubic") -> Spectrum:
    """Translate the spectrum by ``delta`` nm towards longer wavelengths."""
    grid = spectrum.grid
    if abs(delta) >= grid.span:
        raise ValueError(f"shift {delta} nm is not smaller than the span {grid.span} nm")
    if delta == 0:
        return spectrum
    # evaluate the original at (offset - delta) in grid-centred coordinates
    values = resample(grid.offsets, spectrum.intensity, grid.offsets - delta, kind=kind)
    return Spectrum(grid, values)


def integrate(spectrum: Spectrum) -> float:
    """Trapezoid-rule integral over the grid."""
    return float(trapezoid(spectrum.intensity, dx=spectrum.grid.spacing))
