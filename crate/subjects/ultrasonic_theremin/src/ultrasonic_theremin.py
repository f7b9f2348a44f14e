from gpiozero import DistanceSensor, PWMOutputDevice


class UltrasonicTheremin:
    def __init__(self, echo=17, trigger=4, buzzer_pin=18, max_range=2.0):
        if max_range <= 0:
            raise ValueError(f"max_range must be positive, not {max_range}")
        self.sensor = DistanceSensor(echo=echo, trigger=trigger, max_distance=max_range)
        self.buzzer = PWMOutputDevice(buzzer_pin)
        self.max_range = max_range

    def volume_for(self, distance):
        if distance < 0:
            raise ValueError(f"distance must be non-negative, got {distance}")
        return min(1.0, max(0.0, 1 - distance / self.max_range))

    def update(self, distance):
        volume = self.volume_for(distance)
        self.buzzer.value = volume
        return volume

    @property
    def volume(self):
        return self.buzzer.value

    def close(self):
        self.sensor.close()
        self.buzzer.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def main():
    theremin = UltrasonicTheremin()
    while True:
        theremin.update(theremin.sensor.distance)
