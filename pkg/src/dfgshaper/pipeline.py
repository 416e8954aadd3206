"""Imperfection model of the DFG pulse shaper.

A programmed Hermite-Gauss pump spectrum is pushed through the enabled stages
in a fixed order::

    1  programmed pump spectrum          6  phasematching blur (outlook only)
    2  x available pump envelope         7  input-laser linewidth blur
    3  hard pulse-shaper window          8  dual-mode input laser
    4  pulse-shaper resolution blur      9  spectrometer resolution blur
    5  map onto the output axis         10  overlap with the programmed target

and the result is compared with the programmed target carried through
stages 1 and 5 only.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from . import dfg, modes, spectral
from .dfg import DfgScheme, PhasematchingSpec
from .modes import HgTarget
from .spectral import GaussianKernel, Spectrum, SpectralGrid

SCHEMA_VERSION = 1
PRESETS = ("current-experiment", "pulsed-outlook", "ideal")
STAGE_NAMES = {
    1: "programmed",
    2: "envelope",
    3: "window",
    4: "shaper_resolution",
    5: "map_to_output",
    6: "phasematching",
    7: "dye_linewidth",
    8: "dual_mode",
    9: "spectrometer",
    10: "overlap",
}


class ConfigError(ValueError):
    """Invalid pipeline configuration."""


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage number and name."""

    def __init__(self, stage: int, message: str):
        self.stage = stage
        self.stage_name = STAGE_NAMES[stage]
        super().__init__(f"stage {stage} ({self.stage_name}): {message}")


@dataclass(frozen=True)
class StageToggles:
    envelope: bool = True
    window: bool = True
    shaper_resolution: bool = True
    phasematching: bool = False
    dye_linewidth: bool = True
    dual_mode: bool = True
    spectrometer: bool = True

    @classmethod
    def all_off(cls) -> "StageToggles":
        return cls(**{f.name: False for f in fields(cls)})


def _preset_defaults(preset: str) -> dict[str, Any]:
    if preset == "current-experiment":
        return {"stages": StageToggles(), "phasematching": None}
    if preset == "pulsed-outlook":
        return {
            "stages": replace(StageToggles.all_off(), phasematching=True),
            "phasematching": PhasematchingSpec(0.2),
        }
    if preset == "ideal":
        return {"stages": StageToggles.all_off(), "phasematching": None}
    raise ConfigError(f"unknown preset {preset!r}; choose from {PRESETS}")


@dataclass(frozen=True)
class PipelineConfig:
    """Every imperfection parameter of the model plus the per-stage switches.

    Widths quoted in GHz are converted to nm at the centre wavelength of the
    axis they act on.  ``phasematching=None`` means the acceptance is folded
    into ``envelope_fwhm``.  Grid spans and steps are in nm; the output grid is
    centred on the DFG output wavelength.
    """

    preset: str = "current-experiment"
    envelope_fwhm: float = 10.0
    shaper_window: tuple[float, float] = (1530.0, 1565.0)
    shaper_resolution: float = 10.0
    spectrometer_resolution: float = 20.0
    dye_linewidth: float = 5.0
    dual_mode_separation: float = 0.1
    dual_mode_ratio: tuple[float, float] = (0.5, 0.5)
    phasematching: PhasematchingSpec | None = None
    stages: StageToggles = field(default_factory=StageToggles)
    convention: str = "squared"
    interpolation: str = "cubic"
    pump_span: float = 200.0
    pump_step: float = 0.01
    output_span: float = 76.0
    output_step: float = 0.005

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {PRESETS}")
        low, high = (float(v) for v in self.shaper_window)
        if not low < high:
            raise ConfigError(f"shaper window needs low < high, got [{low}, {high}]")
        object.__setattr__(self, "shaper_window", (low, high))
        for name in ("shaper_resolution", "spectrometer_resolution", "dye_linewidth",
                     "dual_mode_separation"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("envelope_fwhm", "pump_span", "pump_step", "output_span", "output_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        w = tuple(float(v) for v in self.dual_mode_ratio)
        if len(w) != 2 or min(w) < 0 or abs(sum(w) - 1.0) > 1e-12:
            raise ConfigError(f"dual_mode_ratio must be two weights summing to 1, got {w}")
        object.__setattr__(self, "dual_mode_ratio", w)
        if self.stages.phasematching and self.phasematching is None:
            raise ConfigError("phasematching stage enabled without a PhasematchingSpec")
        if self.convention not in modes.CONVENTIONS:
            raise ConfigError(f"convention must be one of {modes.CONVENTIONS}")
        if self.interpolation not in ("cubic", "linear"):
            raise ConfigError("interpolation must be 'cubic' or 'linear'")

    @classmethod
    def from_preset(cls, preset: str = "current-experiment", **overrides) -> "PipelineConfig":
        values = _preset_defaults(preset)
        values.update(overrides)
        return cls(preset=preset, **values)

    def with_stages(self, **toggles: bool) -> "PipelineConfig":
        return replace(self, stages=replace(self.stages, **toggles))

    def pump_grid(self, scheme: DfgScheme) -> SpectralGrid:
        return spectral.grid_from_step(scheme.pump_center, self.pump_span, self.pump_step)

    def output_grid(self, scheme: DfgScheme) -> SpectralGrid:
        return spectral.grid_from_step(scheme.output_center, self.output_span, self.output_step)

    def refined(self, factor: int = 2) -> "PipelineConfig":
        """Same physics with both grid densities multiplied by ``factor``."""
        return replace(self, pump_step=self.pump_step / factor,
                       output_step=self.output_step / factor)


# ---------------------------------------------------------------------------
# serialisation


def config_to_dict(config: PipelineConfig, scheme: DfgScheme | None = None) -> dict[str, Any]:
    body = asdict(config)
    body["shaper_window"] = list(config.shaper_window)
    body["dual_mode_ratio"] = list(config.dual_mode_ratio)
    out: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "pipeline": body}
    if scheme is not None:
        out["scheme"] = asdict(scheme)
    return out


def config_from_dict(data: dict[str, Any]) -> tuple[PipelineConfig, DfgScheme]:
    """Rebuild config and scheme.  Missing keys fall back to the named preset."""
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    body = dict(data.get("pipeline", {}))
    preset = body.pop("preset", "current-experiment")
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(body) - known
    if unknown:
        raise ConfigError(f"unknown pipeline keys: {sorted(unknown)}")
    if "stages" in body:
        stage_keys = {f.name for f in fields(StageToggles)}
        bad = set(body["stages"]) - stage_keys
        if bad:
            raise ConfigError(f"unknown stage toggles: {sorted(bad)}")
        base = _preset_defaults(preset)["stages"]
        body["stages"] = replace(base, **body["stages"])
    if body.get("phasematching") is not None:
        body["phasematching"] = PhasematchingSpec(**body["phasematching"])
    for key in ("shaper_window", "dual_mode_ratio"):
        if key in body:
            body[key] = tuple(body[key])
    try:
        config = PipelineConfig.from_preset(preset, **body)
        scheme = DfgScheme(**data.get("scheme", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return config, scheme


def save_config(path, config: PipelineConfig, scheme: DfgScheme | None = None):
    Path(path).write_text(json.dumps(config_to_dict(config, scheme), indent=2) + "\n")


def load_config(path) -> tuple[PipelineConfig, DfgScheme]:
    """Read a JSON config file.  A run manifest is accepted too (its ``config`` entry)."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if "config" in data and "pipeline" not in data:
        data = data["config"]
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# the model


@dataclass(frozen=True)
class ModelResult:
    programmed: Spectrum
    modeled: Spectrum
    overlap: float


def dual_mode_separation_on_output(sep_input: float, scheme: DfgScheme) -> float:
    """Carry a line separation on the input axis to the output axis at fixed pump.

    A frequency offset of the input line reappears unchanged on the output.
    """
    if sep_input < 0:
        raise ValueError(f"separation must be nonnegative, got {sep_input}")
    return sep_input * (scheme.output_center / scheme.input_wavelength) ** 2


def _gauss_or_none(fwhm: float) -> GaussianKernel | None:
    return GaussianKernel(fwhm) if fwhm > 0 else None


def model_pump_spectrum(
    pump: Spectrum, scheme: DfgScheme, config: PipelineConfig, out_grid: SpectralGrid
) -> Spectrum:
    """Run stages 2-9 on a programmed pump spectrum."""
    on = config.stages
    stage = 2
    try:
        s = pump
        if on.envelope:
            env = dfg.pump_envelope(scheme.pump_center, config.envelope_fwhm, pump.grid)
            s = spectral.multiply(s, env)
        stage = 3
        if on.window:
            s = spectral.window(s, *config.shaper_window)
        stage = 4
        if on.shaper_resolution:
            res = spectral.ghz_to_nm(config.shaper_resolution, scheme.pump_center)
            s = spectral.convolve(s, _gauss_or_none(res))
        stage = 5
        s = dfg.map_pump_to_output(s, scheme, out_grid, kind=config.interpolation)
        stage = 6
        if on.phasematching:
            pm = config.phasematching
            pm_out = PhasematchingSpec(dfg.width_on_output(pm.fwhm, scheme), pm.shape)
            s = spectral.convolve(s, dfg.phasematching_kernel(pm_out, out_grid.spacing))
        stage = 7
        if on.dye_linewidth:
            lw = spectral.ghz_to_nm(config.dye_linewidth, scheme.output_center)
            s = spectral.convolve(s, _gauss_or_none(lw))
        stage = 8
        if on.dual_mode:
            sep = dual_mode_separation_on_output(config.dual_mode_separation, scheme)
            w1, w2 = config.dual_mode_ratio
            # lines placed so the weighted mean wavelength stays put
            a = spectral.shift(s, -w2 * sep, kind=config.interpolation)
            b = spectral.shift(s, w1 * sep, kind=config.interpolation)
            s = w1 * a + w2 * b
        stage = 9
        if on.spectrometer:
            res = spectral.ghz_to_nm(config.spectrometer_resolution, scheme.output_center)
            s = spectral.convolve(s, _gauss_or_none(res))
    except StageError:
        raise
    except ValueError as exc:
        raise StageError(stage, str(exc)) from exc
    return s


def programmed_on_output(
    pump: Spectrum, scheme: DfgScheme, config: PipelineConfig, out_grid: SpectralGrid
) -> Spectrum:
    try:
        return dfg.map_pump_to_output(pump, scheme, out_grid, kind=config.interpolation)
    except ValueError as exc:
        raise StageError(5, str(exc)) from exc


def run_pipeline(
    target: HgTarget, scheme: DfgScheme | None = None, config: PipelineConfig | None = None
) -> ModelResult:
    scheme = scheme or DfgScheme()
    config = config or PipelineConfig()
    pump_grid = config.pump_grid(scheme)
    out_grid = config.output_grid(scheme)
    try:
        pump = modes.hg_spectrum(target, pump_grid)
    except ValueError as exc:
        raise StageError(1, str(exc)) from exc
    programmed = programmed_on_output(pump, scheme, config, out_grid)
    modeled = model_pump_spectrum(pump, scheme, config, out_grid)
    try:
        ol = modes.overlap(modeled, programmed)
    except ValueError as exc:
        raise StageError(10, str(exc)) from exc
    return ModelResult(programmed, modeled, ol)


def target_for(order: int, sigma: float, scheme: DfgScheme, config: PipelineConfig) -> HgTarget:
    return HgTarget(order, scheme.pump_center, sigma, config.convention)
