from gpiozero import LineSensor


class LineFollowingRobot:
    def __init__(self, left_motor, right_motor, left_sensor_pin=17, right_sensor_pin=27, speed=0.5):
        if not 0 <= speed <= 1:
            raise ValueError(f"speed must be between 0 and 1, not {speed}")
        self.left_motor = left_motor
        self.right_motor = right_motor
        self.left_sensor = LineSensor(left_sensor_pin)
        self.right_sensor = LineSensor(right_sensor_pin)
        self.speed = speed
        self.left_sensor.when_line = self.update
        self.left_sensor.when_no_line = self.update
        self.right_sensor.when_line = self.update
        self.right_sensor.when_no_line = self.update
        self.update()

    def update(self):
        left = self.left_sensor.value
        right = self.right_sensor.value
        if left and not right:
            self.left_motor.backward(self.speed)
            self.right_motor.forward(self.speed)
        elif right and not left:
            self.left_motor.forward(self.speed)
            self.right_motor.backward(self.speed)
        elif not left and not right:
            self.left_motor.forward(self.speed)
            self.right_motor.forward(self.speed)

    def close(self):
        self.left_sensor.close()
        self.right_sensor.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
