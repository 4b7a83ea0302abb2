"""Alias of :mod:`qtrefftz.construct`."""

from .construct import *  # noqa: F401,F403
