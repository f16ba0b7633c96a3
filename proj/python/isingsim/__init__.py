"""Ising similarity regression: fit pairwise interaction structure to
similarity matrices by penalized pseudo-likelihood, with exact and Gibbs
samplers, cross-validation, sandwich inference, and benchmarking."""

from isingsim._core import *  # noqa: F401,F403
from isingsim._core import __version__  # noqa: F401
