"""Bandwidth and phasematching sweeps, fidelity ranges and record I/O."""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dfg import DfgScheme, PhasematchingSpec
from .pipeline import PipelineConfig, StageError, run_pipeline, target_for

logger = logging.getLogger(__name__)

CSV_FIELDS = ("preset", "order", "sigma_nm", "pm_fwhm_nm", "overlap")
DEFAULT_ORDERS = (0, 1, 2, 3, 4)
DEFAULT_PM_FWHMS = (0.2, 0.5, 1.0, 2.0, 4.3)


@dataclass(frozen=True)
class OverlapRecord:
    preset: str
    order: int
    pm_fwhm: float | None
    sigma: float
    overlap: float

    def __post_init__(self):
        if not 0.0 <= self.overlap <= 1.0 + 1e-12:
            raise ValueError(f"overlap {self.overlap} outside [0, 1]")

    def sort_key(self):
        return (self.order, -1.0 if self.pm_fwhm is None else self.pm_fwhm, self.sigma)


def sigma_values(start: float, stop: float, step: float) -> np.ndarray:
    """``start, start+step, ...`` up to and including ``stop`` (within rounding)."""
    if not start > 0:
        raise ValueError(f"sigma_start must be positive, got {start}")
    if not step > 0:
        raise ValueError(f"sigma_step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"sigma_stop {stop} is below sigma_start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # rounding keeps 0.25-type grids free of accumulated binary noise
    return np.round(start + step * np.arange(count), 12)


def _evaluate(order, sigma, scheme, config, pm_fwhm):
    target = target_for(order, float(sigma), scheme, config)
    try:
        ol = run_pipeline(target, scheme, config).overlap
    except StageError as exc:
        logger.warning("skipping order=%d sigma=%g pm=%s: %s", order, sigma, pm_fwhm, exc)
        return None
    return OverlapRecord(config.preset, order, pm_fwhm, float(sigma), ol)


def sweep_bandwidth(
    orders: Iterable[int] = DEFAULT_ORDERS,
    sigma_start: float = 0.25,
    sigma_stop: float = 10.0,
    sigma_step: float = 0.25,
    config: PipelineConfig | None = None,
    scheme: DfgScheme | None = None,
) -> list[OverlapRecord]:
    """One overlap record per (order, sigma); failing points are logged and skipped."""
    config = config or PipelineConfig()
    scheme = scheme or DfgScheme()
    sigmas = sigma_values(sigma_start, sigma_stop, sigma_step)
    pm = config.phasematching.fwhm if config.stages.phasematching else None
    records = []
    for order in sorted(set(orders)):
        for sigma in sigmas:
            rec = _evaluate(order, sigma, scheme, config, pm)
            if rec is not None:
                records.append(rec)
    return sorted(records, key=OverlapRecord.sort_key)


def sweep_phasematching(
    order: int = 4,
    pm_fwhms: Sequence[float] = DEFAULT_PM_FWHMS,
    sigma_start: float = 0.25,
    sigma_stop: float = 10.0,
    sigma_step: float = 0.25,
    config: PipelineConfig | None = None,
    scheme: DfgScheme | None = None,
) -> list[OverlapRecord]:
    """Overlap records for every (phasematching FWHM, sigma) pair.

    The config must have its phasematching stage switched on, as the
    ``pulsed-outlook`` preset does.
    """
    config = config or PipelineConfig.from_preset("pulsed-outlook")
    scheme = scheme or DfgScheme()
    if not config.stages.phasematching or config.phasematching is None:
        raise ValueError("phasematching sweep needs the phasematching stage enabled")
    sigmas = sigma_values(sigma_start, sigma_stop, sigma_step)
    records = []
    for pm in sorted(set(float(p) for p in pm_fwhms)):
        cfg = replace(config, phasematching=PhasematchingSpec(pm, config.phasematching.shape))
        for sigma in sigmas:
            rec = _evaluate(order, sigma, scheme, cfg, pm)
            if rec is not None:
                records.append(rec)
    return sorted(records, key=OverlapRecord.sort_key)


def find_fidelity_range(
    records: Iterable[OverlapRecord], threshold: float
) -> dict[int, list[tuple[float, float]]]:
    """Maximal contiguous sigma intervals per order where overlap >= threshold.

    Records of different phasematching widths should not be mixed in one call.
    """
    by_order: dict[int, list[OverlapRecord]] = {}
    for rec in records:
        by_order.setdefault(rec.order, []).append(rec)
    ranges = {}
    for order, recs in sorted(by_order.items()):
        recs.sort(key=lambda r: r.sigma)
        intervals = []
        start = prev = None
        for rec in recs:
            if rec.overlap >= threshold:
                if start is None:
                    start = rec.sigma
                prev = rec.sigma
            elif start is not None:
                intervals.append((start, prev))
                start = None
        if start is not None:
            intervals.append((start, prev))
        ranges[order] = intervals
    return ranges


# ---------------------------------------------------------------------------
# record I/O


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def write_csv(records: Iterable[OverlapRecord], path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for r in records:
            writer.writerow([r.preset, r.order, _fmt(r.sigma), _fmt(r.pm_fwhm), _fmt(r.overlap)])


def read_csv(path) -> list[OverlapRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            OverlapRecord(
                preset=row["preset"],
                order=int(row["order"]),
                pm_fwhm=float(row["pm_fwhm_nm"]) if row["pm_fwhm_nm"] else None,
                sigma=float(row["sigma_nm"]),
                overlap=float(row["overlap"]),
            )
            for row in reader
        ]


def write_json(records: Iterable[OverlapRecord], path):
    # same keys as the CSV columns
    rows = [
        dict(zip(CSV_FIELDS, (r.preset, r.order, r.sigma, r.pm_fwhm, r.overlap)))
        for r in records
    ]
    Path(path).write_text(json.dumps({"records": rows}, indent=1) + "\n")


def read_json(path) -> list[OverlapRecord]:
    doc = json.loads(Path(path).read_text())
    return [
        OverlapRecord(r["preset"], r["order"], r["pm_fwhm_nm"], r["sigma_nm"], r["overlap"])
        for r in doc["records"]
    ]
