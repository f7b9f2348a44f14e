import pytest
from hypothesis import given, strategies as st
from gpiozero import Device, InputDevice
from gpiozero.exc import PinInvalidState
from gpiozero.pins.mock import MockFactory, MockPin


@pytest.fixture
def mock_factory():
    Device.pin_factory = MockFactory(pin_class=MockPin)
    return Device.pin_factory


# Closing the device frees its pin for reuse
@given(pull_up=st.booleans())
def test_close_releases_pin(mock_factory, pull_up):
    device = InputDevice(4, pull_up=pull_up)
    device.close()
    assert device.pin is None
    assert device.closed
    InputDevice(4, pull_up=pull_up).close()
