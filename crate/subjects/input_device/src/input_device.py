from gpiozero.devices import GPIODevice
from gpiozero.exc import PinInvalidState


class InputDevice(GPIODevice):
    """
    Generic GPIO input device.

    :param pin: GPIO pin the device is connected to.
    :param pull_up: True pulls the pin high, False (the default) pulls it
        low, None leaves it floating and requires *active_state*.
    :param active_state: polarity of a floating pin.
    :param pin_factory: optional pin factory.
    """
    def __init__(self, pin=None, *, pull_up=False, active_state=None,
                 pin_factory=None):
        super().__init__(pin, pin_factory=pin_factory)
        try:
            self.pin.function = 'input'
            pull = {None: 'floating', True: 'up', False: 'down'}[pull_up]
            if self.pin.pull != pull:
                self.pin.pull = pull
        except:
            self.close()
            raise

        if pull_up is None:
            if active_state is None:
                raise PinInvalidState(
                    f'Pin {self.pin.info.name} is defined as floating, but '
                    f'"active_state" is not defined')
            self._active_state = bool(active_state)
        else:
            if active_state is not None:
                raise PinInvalidState(
                    f'Pin {self.pin.info.name} is not floating, but '
                    f'"active_state" is not None')
            self._active_state = False if pull_up else True
        self._inactive_state = not self._active_state

    @property
    def pull_up(self):
        pull = self.pin.pull
        if pull == 'floating':
            return None
        else:
            return pull == 'up'

    @property
    def is_active(self):
        return self.pin.state == self._active_state

    @property
    def value(self):
        return int(self.is_active)
