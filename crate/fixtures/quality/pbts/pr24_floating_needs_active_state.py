import pytest
from hypothesis import given, strategies as st
from gpiozero import Device, InputDevice
from gpiozero.exc import PinInvalidState
from gpiozero.pins.mock import MockFactory, MockPin


@pytest.fixture
def mock_factory():
    Device.pin_factory = MockFactory(pin_class=MockPin)
    return Device.pin_factory


# A floating pin is only accepted together with an active_state
@given(active_state=st.booleans())
def test_floating_pin_needs_active_state(mock_factory, active_state):
    with pytest.raises(PinInvalidState):
        InputDevice(4, pull_up=None)
    with InputDevice(4, pull_up=None, active_state=active_state) as device:
        assert device.pull_up is None
        assert device.active_state == active_state
