"""scikit-learn style front end.

``HermiteGaussTargets`` turns ``(order, sigma)`` rows into programmed pump
spectra; ``DfgPulseShaper`` turns programmed pump spectra into modeled output
spectra.  Both compose in an ``sklearn.pipeline.Pipeline``::

    pipe = make_pipeline(HermiteGaussTargets(), DfgPulseShaper(preset="ideal"))
    pipe.fit_transform([[4, 5.0]])
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dfg import DfgScheme, PhasematchingSpec
from .modes import HgTarget, hg_spectrum, overlap
from .pipeline import (
    PipelineConfig,
    model_pump_spectrum,
    programmed_on_output,
)
from .spectral import Spectrum, grid_from_step

# constructor arguments that map one-to-one onto PipelineConfig fields
_CONFIG_PARAMS = (
    "envelope_fwhm",
    "shaper_window",
    "shaper_resolution",
    "spectrometer_resolution",
    "dye_linewidth",
    "dual_mode_separation",
    "dual_mode_ratio",
    "convention",
    "interpolation",
    "pump_span",
    "pump_step",
    "output_span",
    "output_step",
)


def _check_pump_rows(X, n_points):
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    if X.shape[1] != n_points:
        raise ValueError(f"X has {X.shape[1]} columns, the pump grid has {n_points} points")
    if np.any(X < 0):
        raise ValueError("pump spectra must be nonnegative")
    return X


class HermiteGaussTargets(TransformerMixin, BaseEstimator):
    """Sample Hermite-Gauss intensity spectra on a pump wavelength grid.

    Each input row is ``(order, sigma_nm)``; each output row is the
    peak-normalised spectrum on a grid of ``span`` nm around ``center``.
    """

    def __init__(self, center=1550.0, span=200.0, step=0.01, convention="squared"):
        self.center = center
        self.span = span
        self.step = step
        self.convention = convention

    def fit(self, X=None, y=None):
        self.grid_ = grid_from_step(self.center, self.span, self.step)
        self.wavelengths_ = self.grid_.wavelengths
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError("each row must be (order, sigma_nm)")
        rows = [
            hg_spectrum(HgTarget(int(n), self.center, s, self.convention), self.grid_).intensity
            for n, s in X
        ]
        return np.vstack(rows)


class DfgPulseShaper(TransformerMixin, BaseEstimator):
    """Model what the DFG shaper and spectrometer make of programmed pump spectra.

    Parameters left as ``None`` take the value of ``preset``.  ``transform``
    maps rows sampled on ``pump_grid_`` to modeled rows on ``output_grid_``;
    ``score`` is the mean overlap with the ideal (programmed) output.
    """

    def __init__(
        self,
        preset="current-experiment",
        input_wavelength=557.0,
        pump_center=1550.0,
        envelope_fwhm=None,
        shaper_window=None,
        shaper_resolution=None,
        spectrometer_resolution=None,
        dye_linewidth=None,
        dual_mode_separation=None,
        dual_mode_ratio=None,
        phasematching_fwhm=None,
        phasematching_shape="gaussian",
        stages=None,
        convention=None,
        interpolation=None,
        pump_span=None,
        pump_step=None,
        output_span=None,
        output_step=None,
    ):
        self.preset = preset
        self.input_wavelength = input_wavelength
        self.pump_center = pump_center
        self.envelope_fwhm = envelope_fwhm
        self.shaper_window = shaper_window
        self.shaper_resolution = shaper_resolution
        self.spectrometer_resolution = spectrometer_resolution
        self.dye_linewidth = dye_linewidth
        self.dual_mode_separation = dual_mode_separation
        self.dual_mode_ratio = dual_mode_ratio
        self.phasematching_fwhm = phasematching_fwhm
        self.phasematching_shape = phasematching_shape
        self.stages = stages
        self.convention = convention
        self.interpolation = interpolation
        self.pump_span = pump_span
        self.pump_step = pump_step
        self.output_span = output_span
        self.output_step = output_step

    def _build_config(self) -> PipelineConfig:
        overrides = {
            name: getattr(self, name) for name in _CONFIG_PARAMS if getattr(self, name) is not None
        }
        if self.phasematching_fwhm is not None:
            overrides["phasematching"] = PhasematchingSpec(
                self.phasematching_fwhm, self.phasematching_shape
            )
        config = PipelineConfig.from_preset(self.preset, **overrides)
        if self.stages:
            config = config.with_stages(**dict(self.stages))
        return config

    def fit(self, X=None, y=None):
        self.config_ = self._build_config()
        self.scheme_ = DfgScheme(self.input_wavelength, self.pump_center)
        self.pump_grid_ = self.config_.pump_grid(self.scheme_)
        self.output_grid_ = self.config_.output_grid(self.scheme_)
        self.n_features_in_ = self.pump_grid_.num_points
        if X is not None:
            _check_pump_rows(X, self.n_features_in_)
        return self

    def _rows(self, X, fn):
        check_is_fitted(self, "config_")
        X = _check_pump_rows(X, self.n_features_in_)
        out = [
            fn(Spectrum(self.pump_grid_, row), self.scheme_, self.config_, self.output_grid_)
            for row in X
        ]
        return np.vstack([s.intensity for s in out])

    def transform(self, X):
        return self._rows(X, model_pump_spectrum)

    def programmed(self, X):
        """Ideal output spectra: the pump rows mapped to the output axis and nothing else."""
        return self._rows(X, programmed_on_output)

    def overlaps(self, X):
        modeled = self.transform(X)
        ideal = self.programmed(X)
        grid = self.output_grid_
        return np.array(
            [overlap(Spectrum(grid, m), Spectrum(grid, p)) for m, p in zip(modeled, ideal)]
        )

    def score(self, X, y=None):
        return float(np.mean(self.overlaps(X)))
