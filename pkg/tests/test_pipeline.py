import json
from dataclasses import replace

import numpy as np
import pytest
from scipy.signal import find_peaks

from dfgshaper import spectral
from dfgshaper.dfg import DfgScheme, PhasematchingSpec, map_pump_to_output
from dfgshaper.modes import HgTarget, hg_spectrum, overlap
from dfgshaper.pipeline import (
    SCHEMA_VERSION,
    ConfigError,
    PipelineConfig,
    StageError,
    StageToggles,
    config_from_dict,
    config_to_dict,
    dual_mode_separation_on_output,
    load_config,
    run_pipeline,
    save_config,
)
from dfgshaper.spectral import GaussianKernel, ghz_to_nm

SCHEME = DfgScheme()


def hg(n, sigma):
    return HgTarget(n, 1550.0, sigma)


@pytest.mark.parametrize("n", range(5))
@pytest.mark.parametrize("sigma", [0.25, 1.0, 3.75, 10.0])
def test_ideal_preset_is_identity(n, sigma):
    result = run_pipeline(hg(n, sigma), SCHEME, PipelineConfig.from_preset("ideal"))
    assert result.overlap == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_array_equal(result.modeled.intensity, result.programmed.intensity)


def test_all_toggles_off_on_current_preset():
    config = PipelineConfig().with_stages(**{k: False for k in StageToggles.__dataclass_fields__})
    for n in range(5):
        assert run_pipeline(hg(n, 2.5), SCHEME, config).overlap == pytest.approx(1, abs=1e-9)


def test_current_experiment_truncates_hg4_outer_lobes():
    result = run_pipeline(hg(4, 10.0), SCHEME, PipelineConfig())
    assert result.overlap < 0.95
    prog, mod = result.programmed.intensity, result.modeled.intensity
    p_peaks, _ = find_peaks(prog, height=1e-3)
    outer = p_peaks[[0, -1]]
    central = p_peaks[2]
    # relative to the central lobe, the outer lobes are strongly suppressed
    assert np.all(mod[outer] / mod[central] < 0.1 * prog[outer] / prog[central])


def test_overlap_field_matches_spectra():
    result = run_pipeline(hg(2, 2.0), SCHEME, PipelineConfig())
    assert result.overlap == overlap(result.programmed, result.modeled)


def test_programmed_is_mapped_target():
    config = PipelineConfig()
    result = run_pipeline(hg(3, 1.5), SCHEME, config)
    pump = hg_spectrum(hg(3, 1.5), config.pump_grid(SCHEME))
    expected = map_pump_to_output(pump, SCHEME, config.output_grid(SCHEME))
    np.testing.assert_array_equal(result.programmed.intensity, expected.intensity)


def test_determinism():
    a = run_pipeline(hg(4, 3.25), SCHEME, PipelineConfig())
    b = run_pipeline(hg(4, 3.25), SCHEME, PipelineConfig())
    assert a.overlap == b.overlap
    np.testing.assert_array_equal(a.modeled.intensity, b.modeled.intensity)


def test_dual_mode_separation_examples():
    assert dual_mode_separation_on_output(0.1, SCHEME) == pytest.approx(0.2437, abs=1e-4)
    assert dual_mode_separation_on_output(0.0, SCHEME) == 0.0
    assert dual_mode_separation_on_output(0.2, SCHEME) == pytest.approx(0.4874, abs=2e-4)
    assert dual_mode_separation_on_output(0.2, SCHEME) == pytest.approx(
        2 * dual_mode_separation_on_output(0.1, SCHEME), rel=1e-15
    )
    with pytest.raises(ValueError):
        dual_mode_separation_on_output(-0.1, SCHEME)


def test_dual_mode_separation_via_frequency():
    # two explicit applications of dnu = c dl / l^2
    dnu = spectral.nm_to_ghz(0.1, 557.0)
    assert dnu == pytest.approx(96.7, abs=0.1)
    assert dual_mode_separation_on_output(0.1, SCHEME) == pytest.approx(
        ghz_to_nm(dnu, SCHEME.output_center), rel=1e-12
    )


BLUR_STAGES = ["shaper_resolution", "dye_linewidth", "spectrometer"]


@pytest.mark.parametrize("sigma", [0.25, 0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("order", [BLUR_STAGES, BLUR_STAGES[::-1]])
def test_adding_blur_never_helps_hg0(sigma, order):
    config = PipelineConfig.from_preset("ideal")
    previous = 1.0
    for name in order:
        config = config.with_stages(**{name: True})
        ol = run_pipeline(hg(0, sigma), SCHEME, config).overlap
        assert ol <= previous + 1e-12
        previous = ol


def test_blur_after_dual_mode_split_can_help():
    # two resolved copies are no longer single-peaked; blurring fills the gap
    split = PipelineConfig.from_preset("ideal").with_stages(dual_mode=True)
    ol_split = run_pipeline(hg(0, 0.25), SCHEME, split).overlap
    ol_blur = run_pipeline(hg(0, 0.25), SCHEME, split.with_stages(spectrometer=True)).overlap
    assert ol_blur > ol_split


def _mapped(n, sigma):
    config = PipelineConfig()
    pump = hg_spectrum(hg(n, sigma), config.pump_grid(SCHEME))
    return map_pump_to_output(pump, SCHEME, config.output_grid(SCHEME))


def test_convolution_stages_commute():
    s = _mapped(4, 0.75)
    kernels = [GaussianKernel(w) for w in (0.063, ghz_to_nm(5, 869.44), ghz_to_nm(20, 869.44))]
    forward = s
    for k in kernels:
        forward = spectral.convolve(forward, k)
    backward = s
    for k in reversed(kernels):
        backward = spectral.convolve(backward, k)
    diff = np.max(np.abs(forward.intensity - backward.intensity))
    assert diff < 1e-10 * forward.intensity.max()


def test_dual_mode_commutes_with_blur():
    s = _mapped(4, 0.75)
    k = GaussianKernel(ghz_to_nm(20, SCHEME.output_center))
    sep = dual_mode_separation_on_output(0.1, SCHEME)

    def dual(x):
        return 0.5 * spectral.shift(x, -sep / 2) + 0.5 * spectral.shift(x, sep / 2)

    a = spectral.convolve(dual(s), k).intensity
    b = dual(spectral.convolve(s, k)).intensity
    assert np.max(np.abs(a - b)) < 1e-6 * a.max()


def test_dual_mode_keeps_weighted_centroid():
    config = PipelineConfig.from_preset("ideal").with_stages(dual_mode=True)
    config = replace(config, dual_mode_ratio=(0.7, 0.3))
    result = run_pipeline(hg(0, 1.0), SCHEME, config)
    lam = result.modeled.wavelengths
    c_mod = np.average(lam, weights=result.modeled.intensity)
    c_prog = np.average(lam, weights=result.programmed.intensity)
    assert c_mod == pytest.approx(c_prog, abs=1e-6)


def test_stage_error_for_grid_too_narrow():
    with pytest.raises(StageError) as info:
        run_pipeline(hg(4, 30.0), SCHEME, PipelineConfig())
    assert info.value.stage == 1
    assert "programmed" in str(info.value)


def test_stage_error_when_window_removes_everything():
    config = replace(PipelineConfig(), shaper_window=(1600.0, 1610.0))
    with pytest.raises(StageError) as info:
        run_pipeline(hg(0, 0.5), SCHEME, config)
    assert info.value.stage == 10


def test_stage_error_for_output_grid():
    config = replace(PipelineConfig.from_preset("ideal"), output_span=4.0)
    with pytest.raises(StageError) as info:
        run_pipeline(hg(0, 3.0), SCHEME, config)
    assert info.value.stage == 5


def test_outlook_blurs_hg4():
    config = PipelineConfig.from_preset("pulsed-outlook")
    assert config.phasematching == PhasematchingSpec(0.2)
    ol = run_pipeline(hg(4, 1.8), SCHEME, config).overlap
    ideal = run_pipeline(hg(4, 1.8), SCHEME, PipelineConfig.from_preset("ideal")).overlap
    assert ol < ideal


def test_outlook_sinc2_kernel_runs():
    config = PipelineConfig.from_preset(
        "pulsed-outlook", phasematching=PhasematchingSpec(1.0, "sinc2")
    )
    assert 0.0 < run_pipeline(hg(4, 1.8), SCHEME, config).overlap < 1.0


# --- config validation and serialisation ------------------------------------


@pytest.mark.parametrize(
    "overrides",
    [
        {"shaper_window": (1565.0, 1530.0)},
        {"dye_linewidth": -1.0},
        {"dual_mode_ratio": (0.6, 0.6)},
        {"envelope_fwhm": 0.0},
        {"preset": "bogus"},
        {"interpolation": "quintic"},
    ],
)
def test_config_rejects(overrides):
    with pytest.raises(ConfigError):
        PipelineConfig(**overrides)


def test_phasematching_stage_needs_spec():
    with pytest.raises(ConfigError):
        PipelineConfig.from_preset("ideal").with_stages(phasematching=True)


def test_presets():
    ideal = PipelineConfig.from_preset("ideal")
    assert not any(vars(ideal.stages).values())
    current = PipelineConfig.from_preset("current-experiment")
    assert current.stages.envelope and not current.stages.phasematching
    assert current.phasematching is None
    assert current.shaper_window == (1530.0, 1565.0)
    outlook = PipelineConfig.from_preset("pulsed-outlook")
    assert outlook.stages == replace(StageToggles.all_off(), phasematching=True)


@pytest.mark.parametrize("preset", ["current-experiment", "pulsed-outlook", "ideal"])
def test_config_round_trip(tmp_path, preset):
    config = PipelineConfig.from_preset(preset, dual_mode_ratio=(0.25, 0.75))
    scheme = DfgScheme(560.0, 1545.0)
    path = tmp_path / "cfg.json"
    save_config(path, config, scheme)
    assert json.loads(path.read_text())["schema_version"] == SCHEMA_VERSION
    assert load_config(path) == (config, scheme)


def test_config_file_overrides_preset():
    data = {"schema_version": 1, "pipeline": {"preset": "ideal", "stages": {"window": True}}}
    config, scheme = config_from_dict(data)
    assert config.stages == replace(StageToggles.all_off(), window=True)
    assert scheme == DfgScheme()


@pytest.mark.parametrize(
    "data",
    [
        {"schema_version": 99, "pipeline": {}},
        {"pipeline": {}},
        {"schema_version": 1, "pipeline": {"colour": "blue"}},
        {"schema_version": 1, "pipeline": {"stages": {"laser": False}}},
        {"schema_version": 1, "pipeline": {}, "scheme": {"input_wavelength": 2000}},
    ],
)
def test_config_from_dict_rejects(data):
    with pytest.raises(ConfigError):
        config_from_dict(data)


def test_config_to_dict_is_json():
    text = json.dumps(config_to_dict(PipelineConfig.from_preset("pulsed-outlook"), SCHEME))
    assert config_from_dict(json.loads(text)) == (
        PipelineConfig.from_preset("pulsed-outlook"),
        SCHEME,
    )
