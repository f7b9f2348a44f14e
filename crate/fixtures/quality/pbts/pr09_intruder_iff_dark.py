from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory
from src.laser_tripwire import LaserTripwire


# An intruder is reported exactly when the beam does not reach the sensor
@given(light_level=st.sampled_from([0.0, 1.0]))
def test_intruder_reported_iff_dark(light_level):
    Device.pin_factory = MockFactory()
    with LaserTripwire() as tripwire:
        intruder = tripwire.check(light_level)
        assert intruder == (light_level < tripwire.threshold)
        assert tripwire.intruder == intruder
