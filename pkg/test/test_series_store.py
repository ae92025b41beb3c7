"""Testing series loading, alignment and transformations"""

import numpy as np
import pandas as pd
import pytest

from policy_thresholds.series_store import (
    Frequency,
    Panel,
    align,
    cumsum_inverse,
    diff,
    format_period,
    load_csv,
    load_panel,
    moving_average,
    parse_period,
    pct_change,
    to_quarterly,
    window,
    write_csv,
)
from policy_thresholds.util import ErrorCode, PolicyThresholdsException

from .shared import LABOR_MONTHLY_PATH
from .util import assert_equal, monthly, quarterly


def _write(tmp_path, text: str, name: str = "data.csv") -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.mark.series
@pytest.mark.parametrize(
    "text, freq, expected",
    [
        ("2012Q3", None, pd.Period("2012Q3", freq="Q")),
        ("2012q1", None, pd.Period("2012Q1", freq="Q")),
        ("2012-06", None, pd.Period("2012-06", freq="M")),
        ("2012-06-15", None, pd.Period("2012-06", freq="M")),
        ("2012-06-15", Frequency.QUARTERLY, pd.Period("2012Q2", freq="Q")),
    ],
)
def test_parse_period(text, freq, expected):
    """Test accepted date formats"""
    assert_equal(parse_period(text, freq), expected)


@pytest.mark.series
@pytest.mark.parametrize("text", ["2012-13", "12-06", "2012Q5", "june", "2012-02-30"])
def test_parse_period_invalid(text):
    """Test malformed dates are rejected"""
    with pytest.raises(PolicyThresholdsException) as raised:
        parse_period(text)
    assert_equal(raised.value.code, ErrorCode.INVALID_SERIES)


@pytest.mark.series
def test_parse_period_mixed_frequencies():
    """Test a month is rejected where a quarter is expected and vice versa"""
    with pytest.raises(PolicyThresholdsException) as raised:
        parse_period("2012-06", Frequency.QUARTERLY)
    assert_equal(raised.value.code, ErrorCode.MIXED_FREQUENCIES)

    with pytest.raises(PolicyThresholdsException) as raised:
        parse_period("2012Q2", Frequency.MONTHLY)
    assert_equal(raised.value.code, ErrorCode.MIXED_FREQUENCIES)


@pytest.mark.series
def test_format_period():
    """Test periods print in the input format"""
    assert_equal(format_period(pd.Period("2015Q2", freq="Q")), "2015Q2")
    assert_equal(format_period(pd.Period("2015-04", freq="M")), "2015-04")


@pytest.mark.series
def test_series_is_immutable():
    """Test series attributes and arrays cannot be changed"""
    series = quarterly("x", [1.0, 2.0, 3.0])
    with pytest.raises(AttributeError):
        series.name = "y"
    with pytest.raises(ValueError):
        series.values[0] = 10.0


@pytest.mark.series
def test_series_rejects_infinite_values():
    """Test non-finite observations are invalid"""
    with pytest.raises(PolicyThresholdsException) as raised:
        quarterly("x", [1.0, np.inf])
    assert_equal(raised.value.code, ErrorCode.INVALID_SERIES)


@pytest.mark.series
def test_load_csv_gaps_become_missing(tmp_path):
    """Test absent dates and empty cells load as missing entries"""
    path = _write(tmp_path, "date,a,b\n1990Q1,1,5\n1990Q2,2,\n1990Q4,4,8\n")
    series = {item.name: item for item in load_csv(path)}

    assert_equal(series["a"].start, pd.Period("1990Q1", freq="Q"))
    assert_equal(len(series["a"]), 4)
    assert_equal(series["a"].missing.tolist(), [False, False, True, False])
    assert_equal(series["b"].missing.tolist(), [False, True, True, False])


@pytest.mark.series
def test_load_csv_sorts_dates(tmp_path):
    """Test rows are ordered by date"""
    path = _write(tmp_path, "date,a\n1990-03,3\n1990-01,1\n1990-02,2\n")
    (series,) = load_csv(path)
    assert_equal(series.values.tolist(), [1.0, 2.0, 3.0])


@pytest.mark.series
def test_load_csv_duplicate_date(tmp_path):
    """Test duplicate dates are rejected"""
    path = _write(tmp_path, "date,a\n1990Q1,1\n1990Q1,2\n")
    with pytest.raises(PolicyThresholdsException) as raised:
        load_csv(path)
    assert_equal(raised.value.code, ErrorCode.INVALID_SERIES)


@pytest.mark.series
def test_load_csv_missing_file(tmp_path):
    """Test an unreadable file is an I/O failure"""
    with pytest.raises(PolicyThresholdsException) as raised:
        load_csv(str(tmp_path / "absent.csv"))
    assert_equal(raised.value.code, ErrorCode.IO_FAILURE)


@pytest.mark.series
def test_load_csv_missing_date_column(tmp_path):
    """Test a file without the date column is rejected"""
    path = _write(tmp_path, "when,a\n1990Q1,1\n")
    with pytest.raises(PolicyThresholdsException) as raised:
        load_csv(path)
    assert_equal(raised.value.code, ErrorCode.INVALID_SERIES)


@pytest.mark.series
def test_load_panel_window():
    """Test the bundled labor panel restricted to a window"""
    panel = load_panel(LABOR_MONTHLY_PATH, ["epop", "unrate"], start="2000-01", end="2000-12")
    assert_equal(panel.names, ["epop", "unrate"])
    assert_equal(len(panel), 12)
    assert_equal(panel.start, pd.Period("2000-01", freq="M"))
    assert_equal(panel.freq, Frequency.MONTHLY)


@pytest.mark.series
def test_load_panel_unknown_column():
    """Test requesting an absent column"""
    with pytest.raises(PolicyThresholdsException) as raised:
        load_panel(LABOR_MONTHLY_PATH, ["gdp"])
    assert_equal(raised.value.code, ErrorCode.INVALID_SERIES)


@pytest.mark.series
def test_diff_and_inverse():
    """Test differencing and rebuilding the levels"""
    series = quarterly("x", [1.0, 4.0, 9.0, 16.0, 25.0])
    differenced = diff(series)

    assert_equal(differenced.values.tolist(), [3.0, 5.0, 7.0, 9.0])
    assert_equal(differenced.start, pd.Period("1990Q2", freq="Q"))
    assert_equal(cumsum_inverse(differenced, [1.0]), series)

    seasonal = diff(series, 2)
    assert_equal(seasonal.values.tolist(), [8.0, 12.0, 16.0])
    assert_equal(cumsum_inverse(seasonal, [1.0, 4.0]).values.tolist(), series.values.tolist())


@pytest.mark.series
def test_diff_propagates_missing():
    """Test a missing level makes both adjacent differences missing"""
    series = quarterly("x", [1.0, np.nan, 3.0, 4.0])
    assert_equal(diff(series).missing.tolist(), [True, True, False])


@pytest.mark.series
@pytest.mark.parametrize("k", [0, -1])
def test_diff_invalid_order(k):
    """Test a non-positive difference order"""
    with pytest.raises(PolicyThresholdsException) as raised:
        diff(quarterly("x", [1.0, 2.0, 3.0]), k)
    assert_equal(raised.value.code, ErrorCode.INVALID_PARAMS)


@pytest.mark.series
def test_moving_average():
    """Test the trailing mean leaves the first window - 1 entries missing"""
    average = moving_average(quarterly("x", [1.0, 2.0, 3.0, 4.0]), 2)
    assert_equal(average.missing.tolist(), [True, False, False, False])
    assert_equal(average.values[1:].tolist(), [1.5, 2.5, 3.5])


@pytest.mark.series
def test_pct_change_annualized():
    """Test quarterly growth compounded to an annual rate"""
    changes = pct_change(quarterly("x", [100.0, 101.0]), annualize=True)
    assert changes.missing[0]
    assert abs(changes.values[1] - 4.060401) < 1e-9


@pytest.mark.series
def test_pct_change_year_over_year():
    """Test four-quarter growth"""
    changes = pct_change(quarterly("x", [100.0, 101.0, 102.0, 103.0, 110.0]), periods=4)
    assert abs(changes.values[4] - 10.0) < 1e-9


@pytest.mark.series
def test_pct_change_zero_denominator():
    """Test a zero level in the denominator"""
    with pytest.raises(PolicyThresholdsException) as raised:
        pct_change(quarterly("x", [0.0, 1.0]))
    assert_equal(raised.value.code, ErrorCode.ZERO_DENOMINATOR)


@pytest.mark.series
def test_align_intersection():
    """Test alignment keeps the overlapping periods only"""
    first = quarterly("a", range(8), start="1990Q1")
    second = quarterly("b", range(8), start="1990Q3")
    panel = align([first, second])

    assert_equal(panel.start, pd.Period("1990Q3", freq="Q"))
    assert_equal(len(panel), 6)
    assert_equal(panel["a"].values[0], 2.0)
    assert_equal(panel["b"].values[0], 0.0)


@pytest.mark.series
def test_align_mixed_frequencies():
    """Test monthly and quarterly series cannot be aligned"""
    with pytest.raises(PolicyThresholdsException) as raised:
        align([quarterly("a", [1.0, 2.0]), monthly("b", [1.0, 2.0])])
    assert_equal(raised.value.code, ErrorCode.MIXED_FREQUENCIES)


@pytest.mark.series
def test_align_disjoint():
    """Test series without common periods"""
    with pytest.raises(PolicyThresholdsException) as raised:
        align([quarterly("a", [1.0, 2.0]), quarterly("b", [1.0, 2.0], start="2000Q1")])
    assert_equal(raised.value.code, ErrorCode.EMPTY_INTERSECTION)


@pytest.mark.series
def test_panel_rejects_mismatched_columns():
    """Test panel columns must share their periods"""
    with pytest.raises(PolicyThresholdsException):
        Panel((quarterly("a", [1.0, 2.0]), quarterly("b", [1.0, 2.0, 3.0])))


@pytest.mark.series
def test_window_clips_to_data():
    """Test a window wider than the data is clipped"""
    series = quarterly("x", range(4))
    clipped = window(series, "1989Q1", "1990Q2")
    assert_equal(clipped.values.tolist(), [0.0, 1.0])


@pytest.mark.series
@pytest.mark.parametrize("how, expected", [("mean", [3.0, 6.0]), ("last", [4.0, 7.0])])
def test_to_quarterly(how, expected):
    """Test monthly to quarterly conversion drops partial quarters"""
    # February start: February and March are dropped, as is the trailing October
    series = monthly("x", [0.0, 0.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 9.0], start="1990-02")
    converted = to_quarterly(series, how)

    assert_equal(converted.freq, Frequency.QUARTERLY)
    assert_equal(converted.start, pd.Period("1990Q2", freq="Q"))
    assert_equal(converted.values.tolist(), expected)


@pytest.mark.series
def test_write_csv_round_trip(tmp_path):
    """Test written panels load back unchanged, missing cells included"""
    panel = Panel(
        (
            quarterly("a", [1.5, np.nan, 3.25], start="2012Q3"),
            quarterly("b", [0.125, 0.25, 0.5], start="2012Q3"),
        )
    )
    path = str(tmp_path / "out.csv")
    write_csv(panel, path)

    with open(path, encoding="utf-8") as csv_file:
        assert_equal(csv_file.readline().strip(), "date,a,b")
    assert_equal(load_panel(path), panel)
