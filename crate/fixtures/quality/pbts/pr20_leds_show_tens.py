import pytest
from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory
from src.presence_indicator import PresenceIndicator


@pytest.fixture
def indicator():
    Device.pin_factory = MockFactory()
    return PresenceIndicator()


# One LED is lit for every ten people present
@given(count=st.integers(min_value=0, max_value=29))
def test_leds_show_tens(indicator, count):
    lit = indicator.update(count)
    assert lit == min(count // 10, 4)
    assert indicator.lit_leds == lit
