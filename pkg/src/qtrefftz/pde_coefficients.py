"""Alias of :mod:`qtrefftz.coefficients`."""

from .coefficients import *  # noqa: F401,F403
