import pytest
from gpiozero import Device, InputDevice
from gpiozero.exc import PinInvalidState
from gpiozero.pins.mock import MockFactory


def test_default_pull_is_down():
    Device.pin_factory = MockFactory()
    with InputDevice(4) as device:
        assert device.pull_up is False
        assert device.pin.pull == 'down'


def test_floating_pin_needs_active_state():
    Device.pin_factory = MockFactory()
    with pytest.raises(PinInvalidState):
        InputDevice(4, pull_up=None)
