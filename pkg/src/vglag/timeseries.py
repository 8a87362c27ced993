"""Equally spaced time series: ingestion, shifting, imputation, missingness and synthetic pairs."""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

DEFAULT_MISSING_TOKENS = frozenset({"", "na", "nan"})


class SeriesError(ValueError):
    """Raised for invalid series contents or arguments."""


class ParseError(SeriesError):
    def __init__(self, row: int, cell: str):
        super().__init__(f"row {row}: cannot parse {cell!r} as a number")
        self.row = row
        self.cell = cell


class ShiftMode(str, enum.Enum):
    CIRCULAR = "circular"
    TRUNCATE = "truncate"


class ImputationMethod(str, enum.Enum):
    LOCF = "locf"
    MEAN_BOUNDS = "mean"


class Carrier(str, enum.Enum):
    """How the periodic part of a simulated series is evaluated.

    SINE: ``A(t) * sin(2 pi f t)`` over t = 1..n.
    SCALAR_N: ``A(t) * sin(2 pi f n)``, the sine taken at the scalar sample
    count exactly as the one-line R recipe ``100*sin(2*pi*(80/1000)*n)``
    evaluates. The carrier is then a per-segment constant, so the series is
    noise around a (piecewise) constant offset.
    """

    SINE = "sine"
    SCALAR_N = "scalar-n"


class MissingTarget(str, enum.Enum):
    ONLY_A = "only_a"
    BOTH_SAME_POSITIONS = "both"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Samples at t = 1..n with an explicit missing mask.

    Missing samples hold NaN in ``values``; the mask is authoritative.
    ``step`` is informational only, all arithmetic is index based.
    """

    values: np.ndarray
    missing_mask: np.ndarray = None  # type: ignore[assignment]
    name: str = ""
    step: float = 1.0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).ravel()
        if self.missing_mask is None:
            mask = np.isnan(values)
        else:
            mask = np.array(self.missing_mask, dtype=bool).ravel()
        if mask.shape != values.shape:
            raise SeriesError(
                f"missing_mask has length {mask.size}, values has length {values.size}"
            )
        if not self.step > 0:
            raise SeriesError(f"step must be positive, got {self.step}")
        values[mask] = np.nan
        if np.isnan(values[~mask]).any():
            raise SeriesError("NaN values must be flagged in missing_mask")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "missing_mask", _frozen(mask))

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            np.array_equal(self.missing_mask, other.missing_mask)
            and np.array_equal(self.values, other.values, equal_nan=True)
            and self.name == other.name
            and self.step == other.step
        )

    @property
    def has_missing(self) -> bool:
        return bool(self.missing_mask.any())

    @property
    def missing_count(self) -> int:
        return int(self.missing_mask.sum())

    def replace(self, values, missing_mask=None) -> "TimeSeries":
        return TimeSeries(values, missing_mask, name=self.name, step=self.step)

    def window(self, start: int, length: int) -> "TimeSeries":
        """Contiguous sub-series of ``length`` samples beginning at 0-based ``start``."""
        if start < 0 or length < 1 or start + length > len(self):
            raise SeriesError(
                f"window [{start}, {start + length}) outside series of length {len(self)}"
            )
        stop = start + length
        return self.replace(self.values[start:stop], self.missing_mask[start:stop])

    def require_complete(self, what: str = "operation") -> np.ndarray:
        """Return the raw values, raising if any are missing."""
        if self.has_missing:
            raise SeriesError(
                f"{what} requires a complete series; {self.name or 'series'} has "
                f"{self.missing_count} missing values (impute first)"
            )
        return self.values


def _normalize_tokens(tokens: Iterable[str] | None) -> frozenset[str]:
    if tokens is None:
        return DEFAULT_MISSING_TOKENS
    return frozenset(t.strip().lower() for t in tokens)


def _resolve_column(column: str | int, header: list[str] | None) -> int:
    if isinstance(column, int):
        return column
    if header is not None and column in header:
        return header.index(column)
    if column.lstrip("-").isdigit():
        return int(column)
    raise SeriesError(f"column {column!r} not found in header {header}")


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _read_rows(stream) -> list[list[str]]:
    if isinstance(stream, (bytes, bytearray)):
        stream = io.StringIO(stream.decode("utf-8"))
    elif isinstance(stream, io.BufferedIOBase) or (
        hasattr(stream, "mode") and "b" in getattr(stream, "mode", "")
    ):
        stream = io.TextIOWrapper(stream, encoding="utf-8", newline="")
    rows = [row if row else [""] for row in csv.reader(stream)]
    # a blank line is an empty (missing) cell, except trailing ones
    while rows and rows[-1] == [""]:
        rows.pop()
    return rows


def _split_header(
    rows: list[list[str]], column: str | int, header: bool | None, tokens: frozenset[str]
) -> tuple[list[str] | None, list[list[str]], int]:
    if header is None:
        # A named column implies a header; otherwise sniff the first row.
        if isinstance(column, str) and not column.lstrip("-").isdigit():
            header = True
        elif rows:
            idx = int(column)
            first = rows[0][idx].strip() if -len(rows[0]) <= idx < len(rows[0]) else ""
            header = not (_is_number(first) or first.lower() in tokens)
        else:
            header = False
    if header:
        if not rows:
            raise SeriesError("empty input: expected a header row")
        names = [h.strip() for h in rows[0]]
        return names, rows[1:], 2
    return None, rows, 1


def from_csv(
    source: str | os.PathLike | IO,
    column: str | int = 0,
    missing_tokens: Iterable[str] | None = None,
    *,
    header: bool | None = None,
    name: str | None = None,
    step: float = 1.0,
) -> TimeSeries:
    """Read one column of a delimited table as a time series.

    ``source`` is a path or an open text/binary stream. ``header=None`` infers
    whether the first row is a header. Cells that are empty or match a missing
    token (case-insensitive) become missing.
    """
    tokens = _normalize_tokens(missing_tokens)
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            rows = _read_rows(fh)
        default_name = str(source)
    else:
        rows = _read_rows(source)
        default_name = ""
    names, data, first_row = _split_header(rows, column, header, tokens)
    idx = _resolve_column(column, names)
    if names is not None and name is None:
        try:
            name = names[idx]
        except IndexError:
            pass

    values = np.empty(len(data))
    mask = np.zeros(len(data), dtype=bool)
    for i, row in enumerate(data):
        rownum = first_row + i
        try:
            cell = row[idx].strip()
        except IndexError:
            raise SeriesError(f"row {rownum}: no column {idx}") from None
        if cell.lower() in tokens:
            mask[i] = True
            values[i] = np.nan
            continue
        try:
            v = float(cell)
        except ValueError:
            raise ParseError(rownum, cell) from None
        if math.isnan(v):
            mask[i] = True
        values[i] = v
    if values.size < 2:
        raise SeriesError(f"need at least 2 observations, got {values.size}")
    return TimeSeries(values, mask, name=name if name is not None else default_name, step=step)


def format_value(v: float) -> str:
    # repr round-trips float64 exactly
    return repr(float(v))


def impute_csv(
    source: IO,
    dest: IO,
    column: str | int,
    method: ImputationMethod,
    missing_tokens: Iterable[str] | None = None,
    *,
    header: bool | None = None,
) -> TimeSeries:
    """Copy a table to ``dest`` with ``column`` gap-filled; returns the imputed series."""
    tokens = _normalize_tokens(missing_tokens)
    rows = _read_rows(source)
    ts = from_csv(io.StringIO(_rows_to_text(rows)), column, tokens, header=header)
    filled = impute(ts, method)
    names, data, _ = _split_header(rows, column, header, tokens)
    idx = _resolve_column(column, names)
    writer = csv.writer(dest, lineterminator="\n")
    if names is not None:
        writer.writerow(rows[0])
    for row, v, was_missing in zip(data, filled.values, ts.missing_mask):
        row = list(row)
        if was_missing:
            row[idx] = format_value(v)
        writer.writerow(row)
    return filled


def _rows_to_text(rows: list[list[str]]) -> str:
    out = io.StringIO()
    csv.writer(out, lineterminator="\n").writerows(rows)
    return out.getvalue()


def to_csv(ts: TimeSeries, dest: IO, header: str | None = "value") -> None:
    """Write a single-column CSV; missing samples are written as ``NA``."""
    writer = csv.writer(dest, lineterminator="\n")
    if header is not None:
        writer.writerow([header])
    for v, m in zip(ts.values, ts.missing_mask):
        writer.writerow(["NA" if m else format_value(v)])


def shift(ts: TimeSeries, lag: int, mode: ShiftMode | str = ShiftMode.CIRCULAR) -> TimeSeries:
    """Delay ``ts`` by ``lag`` samples (negative lag advances it).

    Circular: ``out[t] = ts[(t - lag) mod n]``, length preserved.
    Truncate: the ``n - |lag|`` samples that stay in range after the shift;
    for ``lag > 0`` this is ``ts[:n-lag]``, whose element ``t`` pairs with
    reference index ``t + lag``.
    """
    mode = ShiftMode(mode)
    n = len(ts)
    lag = int(lag)
    if abs(lag) >= n:
        raise SeriesError(f"|lag| must be < series length {n}, got {lag}")
    x = ts.require_complete("shift")
    if mode is ShiftMode.CIRCULAR:
        out = np.roll(x, lag)
    elif lag >= 0:
        out = x[: n - lag].copy()
    else:
        out = x[-lag:].copy()
    return ts.replace(out, np.zeros(out.size, dtype=bool))


def _fill_values(values: np.ndarray, mask: np.ndarray, method: ImputationMethod) -> np.ndarray:
    n = values.size
    idx = np.arange(n)
    observed = ~mask
    # index of nearest observed sample at or before / at or after each position
    prev = np.where(observed, idx, -1)
    np.maximum.accumulate(prev, out=prev)
    nxt = np.where(observed, idx, n)
    nxt = np.minimum.accumulate(nxt[::-1])[::-1]

    has_prev = prev >= 0
    has_next = nxt < n
    before = values[np.where(has_prev, prev, 0)]
    after = values[np.where(has_next, nxt, 0)]
    if method is ImputationMethod.LOCF:
        filled = np.where(has_prev, before, after)
    else:
        filled = np.where(
            has_prev & has_next,
            (before + after) / 2.0,
            np.where(has_prev, before, after),
        )
    return np.where(mask, filled, values)


def impute(ts: TimeSeries, method: ImputationMethod | str) -> TimeSeries:
    """Fill missing samples.

    LOCF carries the previous observed value forward; a leading gap takes the
    first observed value. MEAN_BOUNDS fills each gap with the average of the
    observed values bracketing it; a gap touching either end copies its only
    neighbour.
    """
    method = ImputationMethod(method)
    if not ts.has_missing:
        return ts
    if ts.missing_mask.all():
        raise SeriesError("cannot impute: every value is missing")
    filled = _fill_values(ts.values, ts.missing_mask, method)
    return ts.replace(filled, np.zeros(len(ts), dtype=bool))


def inject_mcar(
    ts_a: TimeSeries,
    ts_b: TimeSeries,
    count: int,
    target: MissingTarget | str,
    rng: np.random.Generator,
) -> tuple[TimeSeries, TimeSeries]:
    """Mark ``count`` distinct uniformly chosen positions as missing.

    Positions are applied to ``ts_a``, and also to ``ts_b`` at the same
    indices when ``target`` is BOTH_SAME_POSITIONS.
    """
    target = MissingTarget(target)
    n = len(ts_a)
    if len(ts_b) != n:
        raise SeriesError(f"series lengths differ: {n} vs {len(ts_b)}")
    if ts_a.has_missing or ts_b.has_missing:
        raise SeriesError("inject_mcar expects series without prior missing values")
    if not 0 <= count < n:
        raise SeriesError(f"missing count must be in [0, {n}), got {count}")
    if count == 0:
        return ts_a, ts_b
    positions = rng.choice(n, size=count, replace=False)
    mask = np.zeros(n, dtype=bool)
    mask[positions] = True
    out_a = ts_a.replace(ts_a.values, mask)
    out_b = ts_b.replace(ts_b.values, mask) if target is MissingTarget.BOTH_SAME_POSITIONS else ts_b
    return out_a, out_b


@dataclass(frozen=True)
class SimulationConfig:
    """Generator parameters for a sinusoid-plus-noise pair with a known lag.

    Noise levels are standard deviations.
    """

    n: int = 50
    amplitude: float = 100.0
    frequency: float = 80 / 1000
    noise_a_sd: float = 25.0
    amplitude_ratio: float = 1 / 3
    noise_b_sd: float = 5.0
    true_lag: int = 2
    seasonal_mid_amplitude: float | None = None
    seed: int = 0
    carrier: Carrier = Carrier.SINE

    def __post_init__(self):
        if self.n < 2:
            raise SeriesError(f"n must be >= 2, got {self.n}")
        if not 0 <= self.true_lag < self.n:
            raise SeriesError(f"true_lag must be in [0, n), got {self.true_lag}")
        if self.noise_a_sd < 0 or self.noise_b_sd < 0:
            raise SeriesError("noise standard deviations must be nonnegative")
        if not self.amplitude_ratio > 0:
            raise SeriesError(f"amplitude_ratio must be positive, got {self.amplitude_ratio}")
        object.__setattr__(self, "carrier", Carrier(self.carrier))

    def amplitude_profile(self) -> np.ndarray:
        amp = np.full(self.n, float(self.amplitude))
        if self.seasonal_mid_amplitude is not None:
            amp[self.n // 3 : 2 * self.n // 3] = self.seasonal_mid_amplitude
        return amp


def simulate_pair(
    cfg: SimulationConfig, rng: np.random.Generator | None = None
) -> tuple[TimeSeries, TimeSeries]:
    """Generate ``(ts_a, ts_b)`` where ``ts_b`` leads ``ts_a`` by ``cfg.true_lag``.

    ``ts_a[t] = A(t) sin(2 pi f t) + N(0, sd_a)`` for t = 1..n and
    ``ts_b[t] = ratio * ts_a[(t + lag) mod n] + N(0, sd_b)``. With the
    SCALAR_N carrier ``t`` is replaced by ``n``. When ``rng`` is omitted the
    stream is seeded from ``cfg.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    t = np.arange(1, cfg.n + 1) if cfg.carrier is Carrier.SINE else cfg.n
    noise_a = rng.normal(0.0, cfg.noise_a_sd, cfg.n)
    noise_b = rng.normal(0.0, cfg.noise_b_sd, cfg.n)
    a = cfg.amplitude_profile() * np.sin(2 * np.pi * cfg.frequency * t) + noise_a
    b = cfg.amplitude_ratio * np.roll(a, -cfg.true_lag) + noise_b
    return TimeSeries(a, name="ts_a"), TimeSeries(b, name="ts_b")


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the path ``key`` under root ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))
