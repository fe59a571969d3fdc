"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure
NumPy fallback takes over transparently. Set ``GBP_PURE=1`` to force the
fallback (used by the benchmark and the backend-parity tests).
"""

import os as _os

from . import _pure

if _os.environ.get("GBP_PURE") == "1":
    _impl = _pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
bp_round = _impl.bp_round
tree_marginals = _impl.tree_marginals
walk_weight_sums = _impl.walk_weight_sums
