from gpiozero import Device
from gpiozero.pins.mock import MockFactory
from src.presence_indicator import PresenceIndicator


def test_empty_room_is_dark():
    Device.pin_factory = MockFactory()
    with PresenceIndicator() as indicator:
        assert indicator.update(0) == 0


def test_twenty_five_people_light_two():
    Device.pin_factory = MockFactory()
    with PresenceIndicator() as indicator:
        assert indicator.update(25) == 2
        assert indicator.lit_leds == 2
