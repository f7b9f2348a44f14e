import pytest
from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory
from src.ultrasonic_theremin import UltrasonicTheremin


@pytest.fixture
def theremin():
    Device.pin_factory = MockFactory()
    return UltrasonicTheremin()


# Moving the hand closer never makes the theremin quieter
@given(d1=st.floats(min_value=0.0, max_value=4.0), d2=st.floats(min_value=0.0, max_value=4.0))
def test_closer_is_louder(theremin, d1, d2):
    near, far = min(d1, d2), max(d1, d2)
    assert theremin.update(near) >= theremin.update(far)
