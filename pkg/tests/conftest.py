import pytest

from tsf.dataset import Dataset, Series


def make_series(values, series_id="s", interval=600, description=None, start_ts=0):
    return Series(
        id=series_id,
        description=description or series_id,
        interval_seconds=interval,
        timestamps=tuple(start_ts + interval * i for i in range(len(values))),
        values=tuple(float(v) for v in values),
    )


def make_dataset(columns, name="synthetic", interval=600):
    """columns: dict of series_id -> values (all same length)."""
    return Dataset(
        name=name,
        series=tuple(
            make_series(vals, series_id=sid, interval=interval)
            for sid, vals in columns.items()
        ),
    )


@pytest.fixture
def linear_series():
    return make_series([0.5 * i for i in range(130)], series_id="lin")


@pytest.fixture
def constant_series():
    return make_series([5.0] * 130, series_id="const")
