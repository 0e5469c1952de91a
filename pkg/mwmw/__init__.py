"""Finite-volume toolkit for the Mermin-Wagner criterion with multipole symmetries."""

__version__ = "0.1.0"
