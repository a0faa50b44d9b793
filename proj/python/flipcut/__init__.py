"""Max-Cut toolkit: incremental flip environment, exhaustive oracle,
greedy/soft heuristics, and a GNN-encode-once recurrent Q-agent.

The compiled extension carries the implementation; this package just
re-exports it. When working from a build tree (no installed wheel), point
FLIPCUT_EXT_DIR at the directory holding the compiled ``_flipcut`` module.
"""

import os
import sys

_ext_dir = os.environ.get("FLIPCUT_EXT_DIR")
if _ext_dir and _ext_dir not in sys.path:
    sys.path.insert(0, _ext_dir)

try:
    from _flipcut import *  # noqa: F401,F403  (build-tree layout)
    from _flipcut import __doc__ as _doc
except ImportError:
    from ._flipcut import *  # noqa: F401,F403  (installed wheel layout)
    from ._flipcut import __doc__ as _doc

__doc__ = _doc
__version__ = "0.1.0"
