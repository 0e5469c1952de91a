"""Exception hierarchy shared by all ``mwmw`` packages.

The CLI maps these onto exit codes: configuration problems exit with 2,
resource ceilings with 3. Failed checks are never exceptions; they are
reported through the ``passed`` flags of the report models.
"""

from __future__ import annotations

from typing import Optional, Sequence


class MWMWError(Exception):
    """Base class for toolkit errors."""


class ConfigError(MWMWError, ValueError):
    """Run configuration could not be resolved."""


class PreconditionError(MWMWError, ValueError):
    """An operation was called outside of its mathematical preconditions."""


class SupportError(MWMWError, ValueError):
    """An operator support is not contained in the volume it is used on."""


class VolumeTooSmallError(MWMWError, ValueError):
    """The working volume does not contain the sites a construction needs.

    Parameters
    ----------
    message : str
        Human readable diagnostic.
    required_sites : Sequence[int] | None
        Site indices that would have to be part of the volume.
    """

    def __init__(self, message: str, required_sites: Optional[Sequence[int]] = None) -> None:
        super().__init__(message)
        self.required_sites = tuple(required_sites) if required_sites is not None else None


class ResourceLimitError(MWMWError, RuntimeError):
    """A dense or sparse construction would exceed the configured size ceiling."""
