"""Entanglement-free quantum metrology with a single qudit.

Submodules: :mod:`.qudit` (states, operators, Bloch representation),
:mod:`.pulses` (Givens rotations), :mod:`.qfi` (Fisher information and
resource measures), :mod:`.protocols` (Dicke-like and GHZ-like estimation),
:mod:`.decoherence` (collective dephasing) and :mod:`.multiqubit`
(symmetric N-qubit equivalence).
"""

__version__ = "0.1.0"

from .exceptions import *  # noqa: F401,F403
from .qudit import *  # noqa: F401,F403
from .pulses import *  # noqa: F401,F403
from .qfi import *  # noqa: F401,F403
from .protocols import *  # noqa: F401,F403
from .decoherence import *  # noqa: F401,F403
from .multiqubit import *  # noqa: F401,F403
