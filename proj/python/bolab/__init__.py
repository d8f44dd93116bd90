"""Born-Oppenheimer model-molecule laboratory."""

from ._bolab import *  # noqa: F401,F403
from ._bolab import __doc__  # noqa: F401
