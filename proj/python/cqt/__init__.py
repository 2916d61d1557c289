"""Energy transport through N collective qubits between two Ohmic photon baths."""

from ._cqt import *  # noqa: F401,F403
from ._cqt import __doc__  # noqa: F401
