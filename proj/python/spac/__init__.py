"""Python surface of the selection toolkit.

Everything lives in the compiled extension; this package only re-exports it.
Data crosses as numpy arrays, estimator results come back as small
read-only objects mirroring the C++ structs.
"""

from ._spac import *  # noqa: F401,F403
from ._spac import __doc__  # noqa: F401

__version__ = "0.1.0"
