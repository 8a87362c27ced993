"""Seeded Monte Carlo experiments measuring how often the lag scan recovers a known lag.

Replicate ``r`` for true lag ``k`` draws its series from the sub-stream
``(seed, k, r, 0)`` and its missing positions from ``(seed, k, r, 1)``, so a
report depends only on the spec and seed, not on execution order or on which
other cells are run.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .lagscan import LagScanConfig, estimate_lag
from .timeseries import (
    Carrier,
    ImputationMethod,
    MissingTarget,
    SimulationConfig,
    impute,
    inject_mcar,
    simulate_pair,
    substream,
)

DEFAULT_REPLICATES = 200
DEFAULT_TRUE_LAGS = (2, 5, 10, 15)
TABLE_IDS = ("T1", "T2", "T3", "T4", "T5")

_GENERATION, _MISSINGNESS = 0, 1


@dataclass(frozen=True)
class MissingSpec:
    count: int
    target: MissingTarget
    method: ImputationMethod

    def __post_init__(self):
        object.__setattr__(self, "target", MissingTarget(self.target))
        object.__setattr__(self, "method", ImputationMethod(self.method))


@dataclass(frozen=True)
class ExperimentSpec:
    sim: SimulationConfig
    true_lags: tuple[int, ...] = DEFAULT_TRUE_LAGS
    replicates: int = DEFAULT_REPLICATES
    lag_cfg: LagScanConfig = field(default_factory=LagScanConfig)
    missing: MissingSpec | None = None
    seed: int = 0
    table: str = "custom"
    row: str = ""

    def __post_init__(self):
        object.__setattr__(self, "true_lags", tuple(int(k) for k in self.true_lags))
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        missing = set(self.true_lags) - set(self.lag_cfg.lags)
        if missing:
            raise ValueError(f"true lags {sorted(missing)} are not in the scanned lag set")
        for k in self.true_lags:
            dataclasses.replace(self.sim, true_lag=k)  # validates k < n
        if self.missing is not None and self.missing.count >= self.sim.n:
            raise ValueError(f"missing count {self.missing.count} must be < n={self.sim.n}")


@dataclass(frozen=True)
class LagCell:
    true_lag: int
    correct: int
    replicates: int

    @property
    def percent_correct(self) -> float:
        return 100.0 * self.correct / self.replicates


@dataclass(frozen=True)
class ExperimentReport:
    spec: ExperimentSpec
    cells: tuple[LagCell, ...]

    def cell(self, true_lag: int) -> LagCell:
        for c in self.cells:
            if c.true_lag == true_lag:
                return c
        raise KeyError(true_lag)

    def percent(self, true_lag: int) -> float:
        return self.cell(true_lag).percent_correct

    def records(self) -> list[dict]:
        return [
            {
                "table": self.spec.table,
                "row": self.spec.row,
                "lag": c.true_lag,
                "percent_correct": c.percent_correct,
                "correct": c.correct,
                "replicates": c.replicates,
                "seed": self.spec.seed,
            }
            for c in self.cells
        ]


def run_replicate(spec: ExperimentSpec, true_lag: int, r: int) -> int:
    """Best lag found for replicate ``r`` of ``true_lag``."""
    cfg = dataclasses.replace(spec.sim, true_lag=true_lag)
    a, b = simulate_pair(cfg, substream(spec.seed, true_lag, r, _GENERATION))
    if spec.missing is not None and spec.missing.count > 0:
        m = spec.missing
        a, b = inject_mcar(a, b, m.count, m.target, substream(spec.seed, true_lag, r, _MISSINGNESS))
        a, b = impute(a, m.method), impute(b, m.method)
    return estimate_lag(a, b, spec.lag_cfg).best_lag


def _run_cell(spec: ExperimentSpec, true_lag: int) -> LagCell:
    hits = sum(run_replicate(spec, true_lag, r) == true_lag for r in range(spec.replicates))
    return LagCell(true_lag, hits, spec.replicates)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentReport:
    """Percent of replicates whose estimated lag equals the true lag, per true lag.

    ``workers > 1`` distributes lag cells over processes; results are identical.
    """
    if workers > 1 and len(spec.true_lags) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, [spec] * len(spec.true_lags), spec.true_lags))
    else:
        cells = [_run_cell(spec, k) for k in spec.true_lags]
    return ExperimentReport(spec, tuple(cells))


def table_specs(
    table_id: str,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    carrier: Carrier | str = Carrier.SCALAR_N,
    lag_cfg: LagScanConfig | None = None,
) -> list[ExperimentSpec]:
    """Experiment rows of one of the five reference simulation tables (T1 to T5).

    ``carrier`` defaults to SCALAR_N, the generator that the reference
    percentages correspond to; pass ``"sine"`` for the oscillating variant.
    """
    table_id = table_id.upper()
    if table_id not in TABLE_IDS:
        raise KeyError(f"unknown table {table_id!r}; valid ids: {', '.join(TABLE_IDS)}")
    lag_cfg = lag_cfg or LagScanConfig()
    base = SimulationConfig(carrier=Carrier(carrier))
    ninth = dataclasses.replace(base, amplitude_ratio=1 / 9)

    rows: list[tuple[str, SimulationConfig, MissingSpec | None]] = []
    if table_id == "T1":
        rows = [(f"n={n}", dataclasses.replace(base, n=n), None) for n in (25, 50)]
    elif table_id == "T2":
        rows = [
            ("ratio=1/9", dataclasses.replace(base, amplitude_ratio=1 / 9), None),
            ("noise_a_sd=50", dataclasses.replace(base, noise_a_sd=50.0), None),
            ("noise_b_sd=10", dataclasses.replace(base, noise_b_sd=10.0), None),
        ]
    elif table_id == "T3":
        rows = [(f"n={n}", dataclasses.replace(ninth, n=n), None) for n in (90, 180, 365)]
    elif table_id == "T4":
        rows = [
            (f"n={n}", dataclasses.replace(ninth, n=n, seasonal_mid_amplitude=30.0), None)
            for n in (90, 180, 360)
        ]
    else:
        sim = dataclasses.replace(ninth, n=180)
        for method in (ImputationMethod.LOCF, ImputationMethod.MEAN_BOUNDS):
            for target in (MissingTarget.BOTH_SAME_POSITIONS, MissingTarget.ONLY_A):
                for count in (9, 18, 27, 36):
                    label = f"missing={count},target={target.value},method={method.value}"
                    rows.append((label, sim, MissingSpec(count, target, method)))

    return [
        ExperimentSpec(
            sim=sim,
            replicates=replicates,
            lag_cfg=lag_cfg,
            missing=missing,
            seed=seed,
            table=table_id,
            row=label,
        )
        for label, sim, missing in rows
    ]


def run_table(
    table_id: str,
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    carrier: Carrier | str = Carrier.SCALAR_N,
    workers: int = 1,
) -> list[ExperimentReport]:
    return [
        run_experiment(spec, workers=workers)
        for spec in table_specs(table_id, replicates, seed, carrier)
    ]


REPORT_FIELDS = ("table", "row", "lag", "percent_correct", "replicates", "seed")


def reports_to_csv(reports: list[ExperimentReport]) -> str:
    out = io.StringIO()
    w = csv.DictWriter(out, REPORT_FIELDS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for rep in reports:
        w.writerows(rep.records())
    return out.getvalue()


def _config_echo(spec: ExperimentSpec) -> dict:
    sim = dataclasses.asdict(spec.sim)
    sim.pop("true_lag")
    sim.pop("seed")
    sim["carrier"] = spec.sim.carrier.value
    echo = {
        "sim": sim,
        "true_lags": list(spec.true_lags),
        "lags": list(spec.lag_cfg.lags),
        "shift_mode": spec.lag_cfg.shift_mode.value,
        "missing": None,
    }
    if spec.missing is not None:
        echo["missing"] = {
            "count": spec.missing.count,
            "target": spec.missing.target.value,
            "method": spec.missing.method.value,
        }
    return echo


def reports_to_json(reports: list[ExperimentReport]) -> str:
    payload = [
        {
            "table": rep.spec.table,
            "row": rep.spec.row,
            "seed": rep.spec.seed,
            "config": _config_echo(rep.spec),
            "results": [
                {k: rec[k] for k in ("lag", "percent_correct", "correct", "replicates")}
                for rec in rep.records()
            ],
        }
        for rep in reports
    ]
    return json.dumps(payload, indent=2) + "\n"


def format_reports(reports: list[ExperimentReport]) -> str:
    """Plain-text grid: one line per row, one column per true lag."""
    if not reports:
        return ""
    lags = reports[0].spec.true_lags
    width = max(len(r.spec.row) for r in reports)
    head = f"{reports[0].spec.table:<{width}}  " + "  ".join(f"{k:>7}" for k in lags)
    lines = [head]
    for rep in reports:
        cells = "  ".join(f"{rep.percent(k):6.1f}%" for k in lags)
        lines.append(f"{rep.spec.row:<{width}}  {cells}")
    return "\n".join(lines) + "\n"
