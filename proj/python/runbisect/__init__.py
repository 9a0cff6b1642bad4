"""Bisection root finding with speculative runahead thread teams.

Everything lives in the compiled core; this package re-exports it.
"""

from runbisect._core import *  # noqa: F401,F403
from runbisect._core import __doc__  # noqa: F401
