from gpiozero import Device
from gpiozero.pins.mock import MockFactory
from src.laser_tripwire import LaserTripwire


def test_dark_reading_prints_intruder(capsys):
    Device.pin_factory = MockFactory()
    with LaserTripwire() as tripwire:
        assert tripwire.check(0.1)
        assert capsys.readouterr().out == "INTRUDER\n"


def test_lit_pin_is_quiet(capsys):
    Device.pin_factory = MockFactory()
    with LaserTripwire() as tripwire:
        tripwire.ldr.pin.drive_high()
        assert not tripwire.check()
        assert capsys.readouterr().out == ""
