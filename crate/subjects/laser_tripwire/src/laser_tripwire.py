from gpiozero import LightSensor


class LaserTripwire:
    def __init__(self, ldr_pin=4, threshold=0.5):
        self.ldr = LightSensor(ldr_pin)
        self.threshold = threshold
        self.intruder = False

    def check(self, light_level=None):
        if light_level is None:
            light_level = 1.0 if self.ldr.light_detected else 0.0
        if not 0 <= light_level <= 1:
            raise ValueError(f"light level must be between 0 and 1, not {light_level}")
        self.intruder = light_level < self.threshold
        if self.intruder:
            print("INTRUDER")
        return self.intruder

    def close(self):
        self.ldr.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def main():
    tripwire = LaserTripwire()
    while True:
        tripwire.ldr.wait_for_dark()
        tripwire.check()
        tripwire.ldr.wait_for_light()


if __name__ == "__main__":
    main()
