import pytest
from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory
from src.ultrasonic_theremin import UltrasonicTheremin


@pytest.fixture
def theremin():
    Device.pin_factory = MockFactory()
    return UltrasonicTheremin()


# The volume never leaves the range 0 to 1
@given(distance=st.floats(min_value=0.0, max_value=4.0))
def test_volume_stays_in_range(theremin, distance):
    volume = theremin.update(distance)
    assert 0.0 <= volume <= 1.0
    assert theremin.volume == volume
