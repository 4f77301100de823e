"""PEV fleet demand response market simulator (pybind11 core)."""

from pevdr._core import *  # noqa: F401,F403
from pevdr._core import __doc__  # noqa: F401
