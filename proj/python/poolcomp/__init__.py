"""Multiple comparisons, classical corrections and hierarchical partial pooling."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
