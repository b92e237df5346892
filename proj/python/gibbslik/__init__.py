"""Conditional-intensity likelihoods for locally stable Gibbs point processes.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from gibbslik._core import *  # noqa: F401,F403
from gibbslik._core import __version__  # noqa: F401
