import pytest
from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory
from src.presence_indicator import PresenceIndicator


@pytest.fixture
def indicator():
    Device.pin_factory = MockFactory()
    return PresenceIndicator()


# More than ten people light at least one LED
@given(count=st.integers(min_value=11, max_value=25))
def test_more_than_ten_lights_one(indicator, count):
    indicator.update(count)
    assert indicator.lit_leds >= 1
