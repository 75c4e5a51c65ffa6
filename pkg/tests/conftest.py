from datetime import datetime, timezone

import pytest

from hydrotrack.sensing import SIP, SensorEvent


def ts_ms(year=2023, month=1, day=2, hour=0, minute=0, second=0):
    return int(datetime(year, month, day, hour, minute, second,
                        tzinfo=timezone.utc).timestamp() * 1000)


def sip(ts, volume_ml):
    return SensorEvent(ts=ts, kind=SIP, volume_ml=volume_ml)


@pytest.fixture
def day_start():
    return ts_ms(2023, 1, 2)


def steady(ts0, grams, n, period_ms=200):
    """n samples at a constant weight starting at ts0."""
    from hydrotrack.sensing import WeightSample
    return [WeightSample(ts=ts0 + i * period_ms, grams=grams) for i in range(n)]
