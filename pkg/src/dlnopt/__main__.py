"""Allow `python -m dlnopt` as an alternative to the console script."""

from .cli import entry

entry()
