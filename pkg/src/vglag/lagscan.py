"""Lag estimation by minimising visibility-graph distance over shifted copies."""

from __future__ import annotations

import csv
import io
import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .timeseries import SeriesError, ShiftMode, TimeSeries
from .visibility import build_graph_fast, edge_difference

DEFAULT_LAGS = tuple(range(21))


def parse_lags(spec: str) -> tuple[int, ...]:
    """Parse ``"a..b"`` inclusive ranges and comma lists, e.g. ``"0..5,10,-2..-1"``."""
    lags: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"empty item in lag set {spec!r}")
        m = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise ValueError(f"descending range {part!r} in lag set")
            lags.extend(range(lo, hi + 1))
        elif re.fullmatch(r"-?\d+", part):
            lags.append(int(part))
        else:
            raise ValueError(f"cannot parse lag set item {part!r}")
    if any(b <= a for a, b in zip(lags, lags[1:])):
        raise ValueError(f"lag set must be strictly increasing, got {spec!r}")
    return tuple(lags)


@dataclass(frozen=True)
class LagScanConfig:
    lags: tuple[int, ...] = DEFAULT_LAGS
    shift_mode: ShiftMode = ShiftMode.CIRCULAR
    tie_break: str = "smallest"

    def __post_init__(self):
        lags = tuple(int(k) for k in self.lags)
        if not lags:
            raise ValueError("lag set must be non-empty")
        if any(b <= a for a, b in zip(lags, lags[1:])):
            raise ValueError(f"lag set must be strictly increasing, got {lags}")
        if self.tie_break != "smallest":
            raise ValueError(f"unsupported tie_break {self.tie_break!r}")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "shift_mode", ShiftMode(self.shift_mode))

    @property
    def max_abs_lag(self) -> int:
        return max(abs(k) for k in self.lags)

    def overlap(self, n: int) -> tuple[int, int]:
        """Reference index range ``[start, stop)`` shared by every lag in truncate mode."""
        start = max(0, self.lags[-1])
        stop = n + min(0, self.lags[0])
        return start, stop


@dataclass(frozen=True)
class LagResult:
    lags: tuple[int, ...]
    edge_differences: tuple[int, ...]
    best_lag: int
    matrix_size: int

    @property
    def distances(self) -> tuple[float, ...]:
        return tuple(math.sqrt(2 * d) for d in self.edge_differences)

    @property
    def best_distance(self) -> float:
        return math.sqrt(2 * min(self.edge_differences))

    @property
    def curve(self) -> dict[int, float]:
        return dict(zip(self.lags, self.distances))


def _check_pair(
    reference: TimeSeries, moving: TimeSeries, cfg: LagScanConfig
) -> tuple[np.ndarray, np.ndarray]:
    n = len(reference)
    if len(moving) != n:
        raise SeriesError(f"series lengths differ: {n} vs {len(moving)}")
    ref = reference.require_complete("lag estimation")
    mov = moving.require_complete("lag estimation")
    if cfg.max_abs_lag >= n:
        raise SeriesError(f"largest |lag| {cfg.max_abs_lag} must be < series length {n}")
    if cfg.shift_mode is ShiftMode.TRUNCATE:
        start, stop = cfg.overlap(n)
        if stop - start < 2:
            raise SeriesError(
                f"truncate overlap of length {stop - start} is too short "
                f"for lags {cfg.lags[0]}..{cfg.lags[-1]}"
            )
    return ref, mov


def _scan(ref: np.ndarray, mov: np.ndarray, cfg: LagScanConfig) -> LagResult:
    n = ref.size
    diffs = []
    if cfg.shift_mode is ShiftMode.CIRCULAR:
        g_ref = build_graph_fast(ref)
        for k in cfg.lags:
            diffs.append(edge_difference(g_ref, build_graph_fast(np.roll(mov, k))))
        size = n
    else:
        start, stop = cfg.overlap(n)
        g_ref = build_graph_fast(ref[start:stop])
        for k in cfg.lags:
            diffs.append(edge_difference(g_ref, build_graph_fast(mov[start - k : stop - k])))
        size = stop - start
    best = int(np.argmin(diffs))  # first minimum is the smallest lag
    return LagResult(cfg.lags, tuple(diffs), cfg.lags[best], size)


def estimate_lag(
    reference: TimeSeries, moving: TimeSeries, cfg: LagScanConfig | None = None
) -> LagResult:
    """Find the delay of ``moving`` that best matches ``reference``.

    For each lag ``k`` the moving series is delayed by ``k`` and its
    visibility graph compared with the reference graph. A positive best lag
    means ``moving`` leads ``reference`` by that many samples.

    In circular mode the delayed copy wraps around and all graphs have ``n``
    nodes. In truncate mode every comparison uses the same reference window
    ``[max(lags), n + min(lags, 0))`` paired with ``moving`` indices offset by
    ``-k``, so no wrapped samples enter and all graphs share one size.
    """
    cfg = cfg or LagScanConfig()
    ref, mov = _check_pair(reference, moving, cfg)
    return _scan(ref, mov, cfg)


def distance_curve_csv(result: LagResult) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["lag", "distance"])
    for k, d in zip(result.lags, result.distances):
        w.writerow([k, repr(d)])
    return out.getvalue()


@dataclass(frozen=True)
class WindowSweepResult:
    window_size: int
    lags: tuple[int, ...]
    histogram: dict[int, int] = field(compare=False)
    modal_lag: int

    @classmethod
    def from_lags(cls, window_size: int, lags, lag_set) -> "WindowSweepResult":
        lags = tuple(int(k) for k in lags)
        counts = Counter(lags)
        histogram = {k: counts.get(k, 0) for k in lag_set}
        top = max(histogram.values())
        modal = min(k for k, c in histogram.items() if c == top)
        return cls(window_size, lags, histogram, modal)

    @property
    def n_windows(self) -> int:
        return len(self.lags)

    def histogram_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["lag", "count"])
        for k, c in self.histogram.items():
            w.writerow([k, c])
        return out.getvalue()

    def trace_csv(self) -> str:
        """Per-window best lag; ``window_start`` is 1-based."""
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["window_start", "best_lag"])
        for p, k in enumerate(self.lags, 1):
            w.writerow([p, k])
        return out.getvalue()


def window_count(length: int, window_size: int, include_last: bool = False) -> int:
    """Number of window positions: ``L - w``, or ``L - w + 1`` with ``include_last``.

    The default stops once the window's right edge reaches the final sample,
    which yields 631 windows for ``L=731, w=100``.
    """
    return length - window_size + (1 if include_last else 0)


def window_sweep(
    reference: TimeSeries,
    moving: TimeSeries,
    window_size: int,
    cfg: LagScanConfig | None = None,
    *,
    include_last: bool = False,
) -> WindowSweepResult:
    """Estimate the lag in successive length-``window_size`` windows, sliding one sample at a time.

    Windows start at 0-based ``p = 0 .. window_count - 1``; ``include_last``
    adds the window ending on the final sample, and is required when
    ``window_size`` equals the series length.
    """
    cfg = cfg or LagScanConfig()
    n = len(reference)
    if len(moving) != n:
        raise SeriesError(f"series lengths differ: {n} vs {len(moving)}")
    if not cfg.max_abs_lag < window_size <= n:
        raise ValueError(
            f"window size must satisfy max |lag| ({cfg.max_abs_lag}) < w <= {n}, got {window_size}"
        )
    count = window_count(n, window_size, include_last)
    if count < 1:
        raise ValueError(f"window size {window_size} leaves no windows; pass include_last")
    ref = reference.require_complete("window sweep")
    mov = moving.require_complete("window sweep")
    probe = TimeSeries(ref[:window_size])
    _check_pair(probe, probe, cfg)
    best = [
        _scan(ref[p : p + window_size], mov[p : p + window_size], cfg).best_lag
        for p in range(count)
    ]
    return WindowSweepResult.from_lags(window_size, best, cfg.lags)
