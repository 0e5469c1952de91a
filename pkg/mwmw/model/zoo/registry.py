"""Auto-discovery registry for builtin interaction builders.

The registry walks the modules of ``mwmw.model.zoo`` and registers every
class that subclasses :class:`BaseInteractionBuilder`, keyed by its ``name``.
"""

from __future__ import annotations

import importlib
import inspect
import logging
import pkgutil
from typing import Any, Dict, List, Mapping, Optional, Tuple, Type

from mwmw.geometry.lattice import Lattice
from mwmw.model.interaction import Interaction
from mwmw.model.zoo.base import BaseInteractionBuilder


_SKIP = {"base", "registry"}


class BuilderRegistry:
    """Registry that discovers and provides interaction builders."""

    def __init__(self, package: str = "mwmw.model.zoo") -> None:
        self._package = package
        self._entries: Dict[str, Type[BaseInteractionBuilder]] = {}

    def discover(self) -> None:
        pkg = importlib.import_module(self._package)
        for modinfo in pkgutil.iter_modules(pkg.__path__, prefix=f"{self._package}."):
            if modinfo.name.rsplit(".", 1)[-1] in _SKIP:
                continue
            try:
                module = importlib.import_module(modinfo.name)
            except Exception:
                logging.exception("Failed to import module during discovery: %s", modinfo.name)
                continue
            for _, obj in inspect.getmembers(module, inspect.isclass):
                if getattr(obj, "__module__", None) != module.__name__:
                    continue
                if issubclass(obj, BaseInteractionBuilder) and obj is not BaseInteractionBuilder:
                    name = obj.model_fields["name"].default
                    self._entries.setdefault(name, obj)

    def list(self) -> List[Tuple[str, Type[BaseInteractionBuilder]]]:
        if not self._entries:
            self.discover()
        return sorted(self._entries.items())

    def get(self, name: str) -> Optional[Type[BaseInteractionBuilder]]:
        if not self._entries:
            self.discover()
        return self._entries.get(name)


_REGISTRY = BuilderRegistry()


def builtin_names() -> List[str]:
    return [name for name, _ in _REGISTRY.list()]


def builtin_local_dim(name: str) -> Optional[int]:
    """Single-site dimension of a zoo model, or ``None`` for an unknown name."""
    cls = _REGISTRY.get(name)
    return None if cls is None else cls().local_dim


def builtin_interaction(
    name: str,
    params: Optional[Mapping[str, Any]],
    lat: Lattice,
    index_set_I: Tuple[int, ...] = (),
) -> Interaction:
    """Build a named model from the zoo.

    Examples
    --------
    >>> from mwmw.geometry import make_hypercubic
    >>> len(builtin_interaction("xy_chain", {"J": 1.0}, make_hypercubic(1, 2)).terms)
    4
    """
    cls = _REGISTRY.get(name)
    if cls is None:
        msg = f"Unknown builtin interaction {name!r}. Available: {builtin_names()}"
        logging.error(msg)
        raise ValueError(msg)
    return cls().build(lat, params, index_set_I=index_set_I)
