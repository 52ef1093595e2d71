"""Python bindings for the OFDM timing synchronization library."""

import os as _os

_data = _os.path.join(_os.path.dirname(__file__), "data")
if _os.path.isdir(_data):
    _os.environ.setdefault("OSL_DATA_DIR", _data)

from ._oslsync import *  # noqa: E402,F401,F403
from ._oslsync import __doc__  # noqa: E402,F401
