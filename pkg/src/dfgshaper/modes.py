"""Hermite-Gauss target spectra and the intensity overlap score."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import Spectrum, SpectralGrid, _check_same_grid
from scipy.integrate import trapezoid

MAX_ORDER = 20
CONVENTIONS = ("squared", "absolute")


def hermite(n: int, x):
    """Physicists' Hermite polynomial ``H_n(x)`` by the three-term recurrence.

    ``x`` may be a scalar or an array.
    """
    if int(n) != n or not 0 <= n <= MAX_ORDER:
        raise ValueError(f"order must be an integer in [0, {MAX_ORDER}], got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * x
    for k in range(1, int(n)):
        prev, cur = cur, 2.0 * x * cur - 2.0 * k * prev
    return cur if cur.ndim else float(cur)


@dataclass(frozen=True)
class HgTarget:
    """Hermite-Gauss target: order, centre wavelength and base-Gaussian width (nm).

    ``convention`` picks what is programmed as intensity: ``"squared"`` uses the
    squared envelope, ``"absolute"`` its magnitude.
    """

    order: int
    center: float
    sigma: float
    convention: str = "squared"

    def __post_init__(self):
        if int(self.order) != self.order or not 0 <= self.order <= MAX_ORDER:
            raise ValueError(f"order must be an integer in [0, {MAX_ORDER}], got {self.order}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        object.__setattr__(self, "order", int(self.order))

    @property
    def half_extent(self) -> float:
        """Half-width of the wavelength range the mode needs on a grid."""
        return self.sigma * (2.0 * np.sqrt(self.order) + 4.0)

    def amplitude(self, wavelengths) -> np.ndarray:
        x = (np.asarray(wavelengths, dtype=float) - self.center) / self.sigma
        return hermite(self.order, x) * np.exp(-0.5 * x * x)


def hg_spectrum(target: HgTarget, grid: SpectralGrid) -> Spectrum:
    """Sample ``target`` on ``grid`` as a peak-normalised intensity spectrum."""
    need = target.half_extent
    if grid.low > target.center - need or grid.high < target.center + need:
        raise ValueError(
            f"grid [{grid.low:g}, {grid.high:g}] nm does not hold HG{target.order} "
            f"with sigma {target.sigma:g} nm (needs {target.center:g} +/- {need:g} nm)"
        )
    # centre-relative offsets keep the samples exactly symmetric about a centred mode
    x = (grid.offsets + (grid.center - target.center)) / target.sigma
    amp = hermite(target.order, x) * np.exp(-0.5 * x * x)
    intensity = amp * amp if target.convention == "squared" else np.abs(amp)
    return Spectrum(grid, intensity / intensity.max())


def overlap(s: Spectrum, t: Spectrum) -> float:
    """Normalised overlap ``(int S T)^2 / (int S^2 int T^2)`` of two intensity spectra."""
    _check_same_grid(s, t)
    dx = s.grid.spacing
    ss = trapezoid(s.intensity * s.intensity, dx=dx)
    tt = trapezoid(t.intensity * t.intensity, dx=dx)
    if ss == 0 or tt == 0:
        raise ValueError("overlap is undefined for an all-zero spectrum")
    st = trapezoid(s.intensity * t.intensity, dx=dx)
    return float(st * st / (ss * tt))
