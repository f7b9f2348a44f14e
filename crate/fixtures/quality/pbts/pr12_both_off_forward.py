import time

from hypothesis import given, strategies as st
from gpiozero import Device, Motor
from gpiozero.pins.mock import MockFactory
from src.line_following_robot import LineFollowingRobot


# With neither sensor on the line both motors drive forward
@given(
    left_sensor_value=st.integers(min_value=0, max_value=1),
    right_sensor_value=st.integers(min_value=0, max_value=1),
    speed=st.floats(min_value=0.1, max_value=1.0),
)
def test_both_sensors_off_drive_forward(left_sensor_value, right_sensor_value, speed):
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3, enable=4, pwm=False), Motor(5, 6, enable=7, pwm=False), ...) as lfr:
        if left_sensor_value > 0:
            lfr.left_sensor.pin.drive_up()
        if right_sensor_value > 0:
            lfr.right_sensor.pin.drive_up()
        time.sleep(0.1)
        if left_sensor_value == 0 and right_sensor_value == 0:
            assert lfr.left_motor.value == speed
            assert lfr.right_motor.value == speed
            assert lfr.left_motor.is_active
