"""
Copyright © 2024 trajforge developers.
"""
import threading
import time


class WallClock:
    """ monotonic wall clock in seconds """

    def now(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float):
        time.sleep(seconds)


class FakeClock:
    """
    Manually advanced clock. ``sleep`` advances time instantly, so a tool "running"
    400 s completes at once while the elapsed time still reads 400 s.
    """

    def __init__(self, start: float = 0.):
        self._t = float(start)
        self._lock = threading.Lock()

    def now(self) -> float:
        with self._lock:
            return self._t

    def advance(self, seconds: float):
        with self._lock:
            self._t += seconds

    def sleep(self, seconds: float):
        self.advance(seconds)


def make_clock(name: str):
    if name == "fake":
        return FakeClock()
    return WallClock()
