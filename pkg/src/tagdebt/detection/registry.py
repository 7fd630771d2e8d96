"""Factory for detection plugins, keyed by the ``detection.type`` config string."""

from __future__ import annotations

import threading
from typing import Callable

from tagdebt.config import DetectionSettings
from tagdebt.detection.base import Detector

Constructor = Callable[[DetectionSettings], Detector]


class RegistryError(Exception):
    pass


class DuplicatePlugin(RegistryError):
    pass


class RegistryFrozen(RegistryError):
    pass


class UnknownPluginType(RegistryError):
    def __init__(self, type_id: str) -> None:
        super().__init__(f"no detection plugin registered for type {type_id!r}")
        self.type_id = type_id


class PluginRegistry:
    def __init__(self) -> None:
        self._entries: dict[str, Constructor] = {}
        self._frozen = False
        self._lock = threading.Lock()

    def register(self, type_id: str, constructor: Constructor) -> None:
        if not type_id:
            raise ValueError("type_id must be non-empty")
        with self._lock:
            if self._frozen:
                raise RegistryFrozen(f"cannot register {type_id!r}: registry is frozen")
            if type_id in self._entries:
                raise DuplicatePlugin(f"plugin type {type_id!r} is already registered")
            self._entries[type_id] = constructor

    def freeze(self) -> PluginRegistry:
        with self._lock:
            self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    @property
    def types(self) -> list[str]:
        return sorted(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, type_id: str) -> bool:
        return type_id in self._entries

    def create(self, settings: DetectionSettings) -> Detector:
        if not self._frozen:
            raise RegistryError("freeze the registry before creating detectors")
        try:
            constructor = self._entries[settings.type]
        except KeyError:
            raise UnknownPluginType(settings.type) from None
        return constructor(settings)


def register_plugin(registry: PluginRegistry, type_id: str, constructor: Constructor) -> None:
    registry.register(type_id, constructor)


def create_detector(registry: PluginRegistry, settings: DetectionSettings) -> Detector:
    return registry.create(settings)


def default_registry() -> PluginRegistry:
    """A frozen registry holding the built-in ``heuristic``, ``rest`` and ``llm`` plugins."""
    from tagdebt.detection.heuristic import HeuristicDetector
    from tagdebt.detection.llm import LlmDetector
    from tagdebt.detection.rest import RestDetector

    registry = PluginRegistry()
    registry.register("heuristic", HeuristicDetector.from_settings)
    registry.register("rest", RestDetector)
    registry.register("llm", LlmDetector)
    return registry.freeze()
