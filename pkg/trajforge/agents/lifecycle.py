"""
Copyright © 2024 trajforge developers.
"""
import logging
import threading

from ..exceptions import LeakDetected

logger = logging.getLogger(__name__)


class ComponentHandle:
    """ live component context; released on ``release()`` or on leaving a ``with`` block """

    def __init__(self, lifecycle, agent_name: str):
        self.lifecycle = lifecycle
        self.agent_name = agent_name
        self.released = False

    def release(self):
        if not self.released:
            self.released = True
            self.lifecycle._release(self)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.release()
        return False


class ComponentLifecycle:
    """
    Instantiates component contexts on demand, one at a time. ``live`` and ``peak``
    gauge the number of contexts alive now and at most.
    """

    def __init__(self):
        self._cond = threading.Condition()
        self.live = 0
        self.peak = 0
        self.acquired = 0

    def acquire(self, agent_name: str) -> ComponentHandle:
        with self._cond:
            while self.live > 0:
                self._cond.wait()
            self.live += 1
            self.acquired += 1
            self.peak = max(self.peak, self.live)
        logger.debug("component %s instantiated", agent_name)
        return ComponentHandle(self, agent_name)

    def _release(self, handle: ComponentHandle):
        with self._cond:
            self.live -= 1
            self._cond.notify_all()
        logger.debug("component %s released", handle.agent_name)

    def check(self):
        """ raises LeakDetected if any handle is still live """
        if self.live:
            raise LeakDetected(f"{self.live} component handle(s) were never released")


def component_lifecycle(agent_name: str, lifecycle: ComponentLifecycle) -> ComponentHandle:
    return lifecycle.acquire(agent_name)
