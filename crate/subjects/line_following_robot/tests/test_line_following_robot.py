import time

from gpiozero import Device, Motor
from gpiozero.pins.mock import MockFactory
from src.line_following_robot import LineFollowingRobot


def test_starts_driving_forward():
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3, enable=4, pwm=False), Motor(5, 6, enable=7, pwm=False)) as lfr:
        assert lfr.left_motor.value == 0.5
        assert lfr.right_motor.value == 0.5


def test_right_sensor_turns_right():
    Device.pin_factory = MockFactory()
    with LineFollowingRobot(Motor(2, 3, enable=4, pwm=False), Motor(5, 6, enable=7, pwm=False), speed=0.3) as lfr:
        lfr.right_sensor.pin.drive_high()
        time.sleep(0.1)
        assert lfr.left_motor.value == 0.3
        assert lfr.right_motor.value == -0.3
