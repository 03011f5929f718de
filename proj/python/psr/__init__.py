"""Exit identities for spectrally negative Levy processes with partial resetting."""

from ._psr import *  # noqa: F401,F403
from ._psr import __doc__  # noqa: F401
