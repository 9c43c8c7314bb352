"""Operator-valued covariance kernels and their KL expansions."""

from ._flowkl import *  # noqa: F401,F403
from ._flowkl import __version__  # noqa: F401
