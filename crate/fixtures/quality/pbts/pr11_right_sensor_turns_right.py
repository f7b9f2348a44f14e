import time

from hypothesis import given, strategies as st
from gpiozero import Device, Motor
from gpiozero.pins.mock import MockFactory
from src.line_following_robot import LineFollowingRobot


# With only the right sensor on the line the right motor reverses and the left motor drives forward
@given(
    right_sensor_value=st.integers(min_value=0, max_value=1),
    speed=st.floats(min_value=0.1, max_value=1.0),
)
def test_right_sensor_turns_right(right_sensor_value, speed):
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3, enable=4, pwm=False), Motor(5, 6, enable=7, pwm=False), ...) as lfr:
        if right_sensor_value > 0:
            lfr.right_sensor.pin.drive_up()
        else:
            lfr.right_sensor.pin.drive_down()
        time.sleep(0.1)
        if right_sensor_value == 1:
            assert lfr.right_motor.value == speed
            assert lfr.left_motor.value == -speed
