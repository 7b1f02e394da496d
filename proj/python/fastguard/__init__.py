"""Fast-attack detection from the victim perspective.

Initial-connection extraction, per-second connection statistics, a
verified static threshold, and Shewhart control-chart verification with
Western Electric rules 1-3.
"""

from ._fastguard import *  # noqa: F401,F403
from ._fastguard import __version__  # noqa: F401
