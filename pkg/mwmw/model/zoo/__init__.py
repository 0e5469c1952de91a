"""Builtin model zoo, discovered from the modules of this package."""

from mwmw.model.zoo.base import BaseInteractionBuilder
from mwmw.model.zoo.registry import BuilderRegistry, builtin_interaction, builtin_local_dim, builtin_names

__all__ = ["BaseInteractionBuilder", "BuilderRegistry", "builtin_interaction", "builtin_local_dim", "builtin_names"]
