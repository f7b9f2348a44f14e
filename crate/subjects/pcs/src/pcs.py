import math
import random
import threading
from time import sleep

SPEED = 1.0
RAISED = 0.0
LOWERED = 2.0
MAX_DWELL = 2


class Cylinder:
    def __init__(self):
        self.location = 0.0
        self.target = None
        self.moving = False

    def move(self, interval: float):
        before = self.location
        if self.target is not None:
            step = SPEED * interval
            if abs(self.target - self.location) <= step:
                self.location = self.target
            elif self.target > self.location:
                self.location += step
            else:
                self.location -= step
        self.moving = self.location != before


class CylinderSensor:
    def __init__(self, a: Cylinder, b: Cylinder):
        self.a = a
        self.b = b
        self.a_loc = a.location
        self.b_loc = b.location

    def start_sensing(self, total_time: float, mock_interval: float):
        for i in range(math.floor(total_time / mock_interval)):
            self.a_loc = self.a.location
            self.b_loc = self.b.location
            sleep(mock_interval)


# Each step names the cylinder to move and its target, or a hold.
CYCLE = [
    ("b", LOWERED),
    ("hold", None),
    ("b", RAISED),
    ("a", LOWERED),
    ("b", LOWERED),
    ("hold", None),
    ("b", RAISED),
    ("a", RAISED),
]


class Controller:
    def __init__(self, sensor: CylinderSensor, a: Cylinder, b: Cylinder):
        self.sensor = sensor
        self.a = a
        self.b = b
        self.step = None
        self.hold_left = 0

    def enter(self, step):
        self.step = step
        which, target = CYCLE[step]
        self.a.target = None
        self.b.target = None
        if which == "a":
            self.a.target = target
        elif which == "b":
            self.b.target = target
        else:
            self.hold_left = random.randint(0, MAX_DWELL)

    def step_done(self):
        which, target = CYCLE[self.step]
        if which == "a":
            return self.sensor.a_loc == target
        if which == "b":
            return self.sensor.b_loc == target
        if self.hold_left == 0:
            return True
        self.hold_left -= 1
        return False

    def control(self, total_time: float, controller_interval: float):
        for i in range(math.floor(total_time / controller_interval)):
            if self.step is None:
                self.enter(0)
            elif self.step_done():
                self.enter((self.step + 1) % len(CYCLE))
            sleep(controller_interval)


class SystemState:
    def __init__(self, cylinder_a_loc, cylinder_b_location, a_moving, b_moving):
        self.cylinder_a_loc = cylinder_a_loc
        self.cylinder_b_location = cylinder_b_location
        self.a_moving = a_moving
        self.b_moving = b_moving


class MockSystem:
    def __init__(self, total_time: float, cylinder_interval: float, controller_interval: float, mock_interval: float):
        self.total_time = total_time
        self.cylinder_interval = cylinder_interval
        self.controller_interval = controller_interval
        self.mock_interval = mock_interval
        self.cylinder_a = Cylinder()
        self.cylinder_b = Cylinder()
        self.sensor = CylinderSensor(self.cylinder_a, self.cylinder_b)
        self.controller = Controller(self.sensor, self.cylinder_a, self.cylinder_b)

    def execute_scenario(self):
        sensor_thread = threading.Thread(target=self.sensor.start_sensing,
                                         args=(self.total_time, self.mock_interval))
        control_thread = threading.Thread(target=self.controller.control,
                                          args=(self.total_time, self.controller_interval))
        sensor_thread.start()
        control_thread.start()

        collected_states = []
        for i in range(math.floor(self.total_time / self.cylinder_interval)):
            self.cylinder_a.move(self.cylinder_interval)
            self.cylinder_b.move(self.cylinder_interval)
            collected_states.append(SystemState(self.cylinder_a.location, self.cylinder_b.location,
                                                self.cylinder_a.moving, self.cylinder_b.moving))
            sleep(self.cylinder_interval)

        sensor_thread.join()
        control_thread.join()
        return collected_states
