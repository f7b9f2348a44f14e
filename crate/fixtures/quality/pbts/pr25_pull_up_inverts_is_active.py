import pytest
from hypothesis import given, strategies as st
from gpiozero import Device, InputDevice
from gpiozero.exc import PinInvalidState
from gpiozero.pins.mock import MockFactory, MockPin


@pytest.fixture
def mock_factory():
    Device.pin_factory = MockFactory(pin_class=MockPin)
    return Device.pin_factory


# With a pull-up the device is active while the pin is low
@given(pull_up=st.booleans())
def test_pull_up_inverts_is_active(mock_factory, pull_up):
    device = InputDevice(4, pull_up=pull_up)
    device.pin.state = True
    assert device.is_active == (not pull_up)
    device.pin.state = False
    assert device.is_active == pull_up
    device.close()
