"""Query-likelihood retrieval with embedding-based translation models."""

from ._ltrank import *  # noqa: F401,F403
from ._ltrank import __version__  # noqa: F401
