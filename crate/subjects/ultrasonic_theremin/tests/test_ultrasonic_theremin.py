from gpiozero import Device
from gpiozero.pins.mock import MockFactory
from src.ultrasonic_theremin import UltrasonicTheremin


def test_half_range_is_half_volume():
    Device.pin_factory = MockFactory()
    with UltrasonicTheremin() as theremin:
        assert theremin.update(1.0) == 0.5
        assert theremin.volume == 0.5


def test_far_hand_is_silent():
    Device.pin_factory = MockFactory()
    with UltrasonicTheremin() as theremin:
        assert theremin.update(5.0) == 0.0
