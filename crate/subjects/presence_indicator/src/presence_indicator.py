from gpiozero import LED


class PresenceIndicator:
    def __init__(self, led_pins=(5, 6, 13, 19)):
        self.leds = [LED(pin) for pin in led_pins]
        self.present_count = 0

    def update(self, count):
        if count < 0:
            raise ValueError(f"present count must be non-negative, got {count}")
        lit = min(count // 10, len(self.leds))
        for i, led in enumerate(self.leds):
            if i < lit:
                led.on()
            else:
                led.off()
        self.present_count = count
        return lit

    @property
    def lit_leds(self):
        return sum(1 for led in self.leds if led.is_lit)

    def close(self):
        for led in self.leds:
            led.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
