"""Configuration-driven command-line runner."""
