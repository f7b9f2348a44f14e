import time

from hypothesis import given, strategies as st
from gpiozero import Device, Motor
from gpiozero.pins.mock import MockFactory
from src.line_following_robot import LineFollowingRobot


# With only the left sensor on the line the left motor reverses and the right motor drives forward
@given(
    left_sensor_value=st.integers(min_value=0, max_value=1),
    speed=st.floats(min_value=0.1, max_value=1.0),
)
def test_left_sensor_turns_left(left_sensor_value, speed):
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3, enable=4, pwm=False), Motor(5, 6, enable=7, pwm=False), ...) as lfr:
        if left_sensor_value > 0:
            lfr.left_sensor.pin.drive_up()
        else:
            lfr.left_sensor.pin.drive_down()
        time.sleep(0.1)
        if left_sensor_value == 1:
            assert lfr.left_motor.value == speed
            assert lfr.right_motor.value == -speed
