"""Alias of :mod:`qtrefftz.cli`."""

from .cli import *  # noqa: F401,F403
from .cli import main  # noqa: F401
