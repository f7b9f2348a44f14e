import pytest
from hypothesis import given, strategies as st
from gpiozero import Device, InputDevice
from gpiozero.exc import PinInvalidState
from gpiozero.pins.mock import MockFactory, MockPin


@pytest.fixture
def mock_factory():
    Device.pin_factory = MockFactory(pin_class=MockPin)
    return Device.pin_factory


# The pull_up argument decides how the pin is pulled
@given(pull_up=st.booleans())
def test_pull_up_sets_pin_pull(mock_factory, pull_up):
    with InputDevice(4, pull_up=pull_up) as device:
        assert device.pin.pull == ('up' if pull_up else 'down')
        assert device.pull_up == pull_up
