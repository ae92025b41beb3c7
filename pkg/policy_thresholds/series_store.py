"""
Loading, alignment and transformation of the monthly and quarterly series
consumed by the econometric and calibration code.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .constants import CSV_FLOAT_FORMAT, DEFAULT_DATE_COLUMN
from .util import ErrorCode, PolicyThresholdsException

logger = logging.getLogger(__name__)


class Frequency(Enum):
    """Supported sampling frequencies"""

    MONTHLY = "M"
    QUARTERLY = "Q"

    @property
    def periods_per_year(self) -> int:
        """Number of observations per year"""
        return 12 if self is Frequency.MONTHLY else 4

    @classmethod
    def parse(cls, name: str) -> "Frequency":
        """Parse `monthly`, `quarterly`, `M` or `Q`"""
        for member in cls:
            if name.lower() in (member.name.lower(), member.value.lower()):
                return member
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_SERIES,
            message=f"Unknown frequency: {name}. Valid options: monthly, quarterly",
        )


PeriodLike = Union[str, pd.Period]


def _invalid(message: str):
    return PolicyThresholdsException(code=ErrorCode.INVALID_SERIES, message=message)


def parse_period(text: str, freq: Optional[Frequency] = None) -> pd.Period:
    """
    Parse `YYYY-MM`, `YYYY-MM-DD` or `YYYYQn` into a period.
    An ISO date is mapped to its month, or to its quarter when `freq` is quarterly.
    """
    raw = str(text).strip()
    try:
        if "Q" in raw.upper():
            period = pd.Period(raw.upper(), freq="Q")
        else:
            parts = raw.split("-")
            if len(parts) not in (2, 3) or len(parts[0]) != 4:
                raise ValueError(raw)
            year, month = int(parts[0]), int(parts[1])
            if not 1 <= month <= 12:
                raise ValueError(raw)
            if len(parts) == 3:
                # validates the day
                pd.Timestamp(raw)
            period = pd.Period(year=year, month=month, freq="M")
    except ValueError as err:
        raise _invalid(f"Invalid date: {raw}") from err

    if freq is Frequency.QUARTERLY and period.freqstr.startswith("M"):
        if len(raw.split("-")) != 3:
            raise PolicyThresholdsException(
                code=ErrorCode.MIXED_FREQUENCIES,
                message=f"Monthly date {raw} in a quarterly series",
            )
        return period.asfreq("Q")
    if freq is Frequency.MONTHLY and period.freqstr.startswith("Q"):
        raise PolicyThresholdsException(
            code=ErrorCode.MIXED_FREQUENCIES,
            message=f"Quarterly date {raw} in a monthly series",
        )
    return period


def period_frequency(period: pd.Period) -> Frequency:
    """Frequency of a pandas period"""
    return Frequency.QUARTERLY if period.freqstr.startswith("Q") else Frequency.MONTHLY


def format_period(period: pd.Period) -> str:
    """Format as `YYYY-MM` or `YYYYQn`"""
    if period_frequency(period) is Frequency.QUARTERLY:
        return f"{period.year}Q{period.quarter}"
    return f"{period.year}-{period.month:02d}"


def to_period(value: PeriodLike, freq: Frequency) -> pd.Period:
    """Coerce a string or period to a period of the given frequency"""
    if isinstance(value, pd.Period):
        if period_frequency(value) is not freq:
            raise PolicyThresholdsException(
                code=ErrorCode.MIXED_FREQUENCIES,
                message=f"Period {format_period(value)} is not {freq.name.lower()}",
            )
        return value
    return parse_period(value, freq)


def period_range(start: pd.Period, length: int) -> List[pd.Period]:
    """Consecutive periods starting at `start`"""
    return [start + i for i in range(length)]


class TimeSeries:
    """
    Dated, fixed-frequency real series with a missing-value mask.
    Immutable: the value and mask arrays are read-only copies.
    """

    __slots__ = ("name", "freq", "start", "values", "missing")

    def __init__(
        self,
        name: str,
        freq: Frequency,
        start: PeriodLike,
        values: Iterable[float],
        missing: Optional[Iterable[bool]] = None,
    ):
        values_arr = np.array(
            values if isinstance(values, np.ndarray) else list(values), dtype=float
        )
        if values_arr.ndim != 1 or values_arr.size < 1:
            raise _invalid(f"Series {name} must have at least one observation")

        if missing is None:
            missing_arr = np.isnan(values_arr)
        else:
            missing_arr = np.array(list(missing), dtype=bool)
            if missing_arr.shape != values_arr.shape:
                raise _invalid(f"Series {name}: values and missing mask differ in length")
            missing_arr = missing_arr | np.isnan(values_arr)

        present = values_arr[~missing_arr]
        if not np.all(np.isfinite(present)):
            raise _invalid(f"Series {name} contains non-finite values")

        values_arr = np.where(missing_arr, np.nan, values_arr)
        values_arr.setflags(write=False)
        missing_arr.setflags(write=False)

        object.__setattr__(self, "name", name)
        object.__setattr__(self, "freq", freq)
        object.__setattr__(self, "start", to_period(start, freq))
        object.__setattr__(self, "values", values_arr)
        object.__setattr__(self, "missing", missing_arr)

    def __setattr__(self, key, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.name == other.name
            and self.freq is other.freq
            and self.start == other.start
            and np.array_equal(self.missing, other.missing)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    def __hash__(self):
        return hash((self.name, self.freq, self.start, len(self)))

    def __repr__(self):
        return (
            f"TimeSeries({self.name!r}, {self.freq.name.lower()}, "
            f"{format_period(self.start)}..{format_period(self.end)}, n={len(self)})"
        )

    @property
    def end(self) -> pd.Period:
        """Last period of the series"""
        return self.start + (len(self) - 1)

    @property
    def periods(self) -> List[pd.Period]:
        """Period of every observation"""
        return period_range(self.start, len(self))

    def present(self) -> np.ndarray:
        """Non-missing values"""
        return self.values[~self.missing]

    def rename(self, name: str) -> "TimeSeries":
        """Copy under another name"""
        return TimeSeries(name, self.freq, self.start, self.values, self.missing)

    def to_pandas(self) -> pd.Series:
        """Series indexed by a PeriodIndex; missing entries are NaN"""
        index = pd.PeriodIndex(self.periods, freq=self.freq.value)
        return pd.Series(np.array(self.values), index=index, name=self.name)

    @classmethod
    def from_pandas(cls, series: pd.Series, name: Optional[str] = None) -> "TimeSeries":
        """Build from a series indexed by consecutive periods"""
        if not isinstance(series.index, pd.PeriodIndex):
            raise _invalid("Expected a PeriodIndex")
        freq = period_frequency(series.index[0])
        return cls(name or str(series.name), freq, series.index[0], series.to_numpy(dtype=float))


@dataclass(frozen=True, eq=False)
class Panel:
    """Columns sharing frequency, start and length"""

    columns: Tuple[TimeSeries, ...]

    def __post_init__(self):
        if not self.columns:
            raise _invalid("A panel needs at least one column")
        first = self.columns[0]
        for column in self.columns[1:]:
            if column.freq is not first.freq:
                raise PolicyThresholdsException(
                    code=ErrorCode.MIXED_FREQUENCIES,
                    message=f"Panel mixes frequencies: {first.name} and {column.name}",
                )
            if column.start != first.start or len(column) != len(first):
                raise _invalid(
                    f"Panel columns {first.name} and {column.name} cover different periods"
                )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Panel):
            return NotImplemented
        return len(self.columns) == len(other.columns) and all(
            mine == theirs for mine, theirs in zip(self.columns, other.columns)
        )

    def __hash__(self):
        return hash(tuple(self.columns))

    def __len__(self) -> int:
        return len(self.columns[0])

    def __getitem__(self, name: str) -> TimeSeries:
        for column in self.columns:
            if column.name == name:
                return column
        raise _invalid(f"Panel has no column {name}; available: {', '.join(self.names)}")

    def __contains__(self, name: str) -> bool:
        return name in self.names

    @property
    def names(self) -> List[str]:
        """Column names in order"""
        return [column.name for column in self.columns]

    @property
    def freq(self) -> Frequency:
        """Shared frequency"""
        return self.columns[0].freq

    @property
    def start(self) -> pd.Period:
        """Shared first period"""
        return self.columns[0].start

    @property
    def index(self) -> pd.PeriodIndex:
        """Shared period range"""
        return pd.PeriodIndex(self.columns[0].periods, freq=self.freq.value)

    @property
    def incomplete_rows(self) -> np.ndarray:
        """True for rows with any missing cell; excluded from regressions by default"""
        return np.any(np.vstack([column.missing for column in self.columns]), axis=0)

    def select(self, names: Sequence[str]) -> "Panel":
        """Panel of the named columns"""
        return Panel(tuple(self[name] for name in names))


def load_csv(
    path: str,
    date_column: str = DEFAULT_DATE_COLUMN,
    freq: Optional[Frequency] = None,
) -> List[TimeSeries]:
    """
    Load every numeric column of a CSV file as a series.
    Frequency is inferred from the first date when not given.
    Gaps in the date index become missing entries.
    """
    try:
        frame = pd.read_csv(path, dtype={date_column: str}, skipinitialspace=True)
    except (OSError, UnicodeDecodeError) as err:
        raise PolicyThresholdsException(
            code=ErrorCode.IO_FAILURE, message=f"Cannot read {path}: {err}"
        ) from err
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as err:
        raise _invalid(f"Cannot parse {path}: {err}") from err

    if date_column not in frame.columns:
        raise _invalid(f"{path} has no date column {date_column}")
    if frame.empty:
        raise _invalid(f"{path} has no rows")

    raw_dates = frame[date_column].astype(str).tolist()
    if freq is None:
        freq = period_frequency(parse_period(raw_dates[0]))
    periods = [parse_period(raw, freq) for raw in raw_dates]

    ordinals = pd.Series([period.ordinal for period in periods])
    if ordinals.duplicated().any():
        duplicate = raw_dates[int(np.flatnonzero(ordinals.duplicated().to_numpy())[0])]
        raise _invalid(f"{path} has a duplicate date: {duplicate}")

    frame = frame.drop(columns=[date_column])
    frame.index = pd.PeriodIndex(periods, freq=freq.value)
    frame = frame.sort_index()

    numeric = [
        name for name in frame.columns if pd.api.types.is_numeric_dtype(frame[name])
    ]
    skipped = [name for name in frame.columns if name not in numeric]
    if skipped:
        logger.debug("Skipping non-numeric columns of %s: %s", path, ", ".join(skipped))
    if not numeric:
        raise _invalid(f"{path} has no numeric column")

    full_index = pd.period_range(frame.index[0], frame.index[-1], freq=freq.value)
    frame = frame.reindex(full_index)
    if len(full_index) > len(periods):
        logger.info("%s: %d gaps filled as missing", path, len(full_index) - len(periods))

    return [
        TimeSeries(str(name), freq, full_index[0], frame[name].to_numpy(dtype=float))
        for name in numeric
    ]


def load_panel(
    path: str,
    columns: Optional[Sequence[str]] = None,
    date_column: str = DEFAULT_DATE_COLUMN,
    start: Optional[PeriodLike] = None,
    end: Optional[PeriodLike] = None,
) -> Panel:
    """Load a CSV file as a panel, optionally restricted to columns and a period window"""
    loaded = {series.name: series for series in load_csv(path, date_column)}
    names = list(columns) if columns else list(loaded)
    missing_names = [name for name in names if name not in loaded]
    if missing_names:
        raise _invalid(f"{path} has no column(s): {', '.join(missing_names)}")
    selected = [loaded[name] for name in names]
    if start is not None or end is not None:
        selected = [window(series, start, end) for series in selected]
    return align(selected)


def _check_positive(name: str, value: int):
    if not isinstance(value, (int, np.integer)) or value <= 0:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"{name} must be a positive integer; got: {value}",
        )


def diff(series: TimeSeries, k: int = 1) -> TimeSeries:
    """k-th difference; output[i] = s[i + k] - s[i]"""
    _check_positive("k", k)
    if len(series) <= k:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Series {series.name} needs more than {k} observations to difference",
        )
    values = series.values[k:] - series.values[:-k]
    missing = series.missing[k:] | series.missing[:-k]
    return TimeSeries(f"{series.name}_diff", series.freq, series.start + k, values, missing)


def cumsum_inverse(differenced: TimeSeries, seed: Sequence[float]) -> TimeSeries:
    """Rebuild the levels from a k-differenced series and its first k levels"""
    k = len(seed)
    _check_positive("len(seed)", k)
    if np.any(differenced.missing):
        raise _invalid(f"Cannot integrate {differenced.name}: it has missing values")

    levels = np.empty(len(differenced) + k)
    levels[:k] = seed
    for i in range(k, levels.size):
        levels[i] = levels[i - k] + differenced.values[i - k]

    name = differenced.name
    if name.endswith("_diff"):
        name = name[: -len("_diff")]
    return TimeSeries(name, differenced.freq, differenced.start - k, levels)


def moving_average(series: TimeSeries, window_size: int) -> TimeSeries:
    """Trailing mean; the first window_size - 1 entries are missing"""
    _check_positive("window", window_size)
    if len(series) < window_size:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Series {series.name} is shorter than the window {window_size}",
        )
    rolled = series.to_pandas().rolling(window=window_size, min_periods=window_size).mean()
    return TimeSeries(
        f"{series.name}_ma{window_size}", series.freq, series.start, rolled.to_numpy()
    )


def pct_change(series: TimeSeries, periods: int = 1, annualize: bool = False) -> TimeSeries:
    """
    Percent change over `periods` observations.
    With `annualize`, the ratio is compounded to a yearly rate.
    """
    _check_positive("periods", periods)
    if len(series) <= periods:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Series {series.name} needs more than {periods} observations",
        )

    current = series.values[periods:]
    previous = series.values[:-periods]
    both_present = ~(series.missing[periods:] | series.missing[:-periods])
    if np.any(previous[both_present] == 0):
        raise PolicyThresholdsException(
            code=ErrorCode.ZERO_DENOMINATOR,
            message=f"Series {series.name} has a zero value in a denominator",
        )

    ratio = np.full(current.shape, np.nan)
    ratio[both_present] = current[both_present] / previous[both_present]
    if annualize:
        if np.any(ratio[both_present] < 0):
            raise _invalid(f"Series {series.name} changes sign; cannot annualize")
        changes = 100.0 * (np.power(ratio, series.freq.periods_per_year / periods) - 1.0)
    else:
        changes = 100.0 * (ratio - 1.0)

    values = np.concatenate([np.full(periods, np.nan), changes])
    return TimeSeries(f"{series.name}_pct", series.freq, series.start, values)


def align(series: Sequence[TimeSeries]) -> Panel:
    """Panel spanning the intersection of the date ranges"""
    if not series:
        raise _invalid("Nothing to align")
    freq = series[0].freq
    for item in series[1:]:
        if item.freq is not freq:
            raise PolicyThresholdsException(
                code=ErrorCode.MIXED_FREQUENCIES,
                message=f"Cannot align {series[0].name} ({freq.name.lower()}) "
                f"with {item.name} ({item.freq.name.lower()})",
            )

    start = max(item.start for item in series)
    end = min(item.end for item in series)
    if start > end:
        raise PolicyThresholdsException(
            code=ErrorCode.EMPTY_INTERSECTION,
            message=f"Series {', '.join(item.name for item in series)} do not overlap",
        )
    return Panel(tuple(window(item, start, end) for item in series))


def window(
    series: TimeSeries,
    start: Optional[PeriodLike] = None,
    end: Optional[PeriodLike] = None,
) -> TimeSeries:
    """Slice to the inclusive period range, clipped to the available data"""
    first = series.start if start is None else max(to_period(start, series.freq), series.start)
    last = series.end if end is None else min(to_period(end, series.freq), series.end)
    if first > last:
        raise PolicyThresholdsException(
            code=ErrorCode.EMPTY_INTERSECTION,
            message=f"Series {series.name} has no observations in the requested window",
        )
    offset = (first - series.start).n
    length = (last - first).n + 1
    return TimeSeries(
        series.name,
        series.freq,
        first,
        series.values[offset : offset + length],
        series.missing[offset : offset + length],
    )


def to_quarterly(series: TimeSeries, how: str = "mean") -> TimeSeries:
    """
    Monthly to quarterly by within-quarter mean or last observation.
    Partial quarters at either end are dropped; a quarter with a missing month is missing.
    """
    if series.freq is Frequency.QUARTERLY:
        return series
    if how not in ("mean", "last"):
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"Invalid conversion: {how}. Valid options: mean, last",
        )

    lead = (3 - (series.start.month - 1) % 3) % 3
    usable = (len(series) - lead) // 3
    if usable < 1:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Series {series.name} does not cover a full quarter",
        )

    blocks = series.values[lead : lead + 3 * usable].reshape(usable, 3)
    gaps = series.missing[lead : lead + 3 * usable].reshape(usable, 3).any(axis=1)
    values = blocks.mean(axis=1) if how == "mean" else blocks[:, -1]
    start = (series.start + lead).asfreq("Q")
    return TimeSeries(series.name, Frequency.QUARTERLY, start, values, gaps)


def panel_frame(panel: Panel, dropna: bool = False) -> pd.DataFrame:
    """DataFrame with a PeriodIndex; `dropna` applies listwise deletion"""
    frame = pd.DataFrame(
        np.column_stack([column.values for column in panel.columns]),
        index=panel.index,
        columns=panel.names,
    )
    if dropna:
        frame = frame[~panel.incomplete_rows]
    return frame


def write_csv(
    data: Union[TimeSeries, Panel],
    path: str,
    date_column: str = DEFAULT_DATE_COLUMN,
):
    """Write in the input CSV format: 12 significant digits, empty cell for missing"""
    panel = data if isinstance(data, Panel) else Panel((data,))
    frame = panel_frame(panel)
    frame.index = [format_period(period) for period in panel.index]
    frame.index.name = date_column
    try:
        frame.to_csv(path, float_format=CSV_FLOAT_FORMAT, na_rep="")
    except OSError as err:
        raise PolicyThresholdsException(
            code=ErrorCode.IO_FAILURE, message=f"Cannot write {path}: {err}"
        ) from err
