"""Backend selection for the hot all-pairs kernels.

The compiled extension is used when it imports; otherwise the NumPy
implementation is used. Setting ``MOM_TOURNAMENT_PURE=1`` forces the NumPy
path. Both backends expose the same functions with identical results.
"""

import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

_impl = _kernels_py
if os.environ.get("MOM_TOURNAMENT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        log.debug("compiled kernels unavailable, using NumPy fallback")

BACKEND = _impl.BACKEND
block_means = _impl.block_means
med_of_means = _impl.med_of_means
column_med_of_means = _impl.column_med_of_means
phi_matrix = _impl.phi_matrix
match_tallies = _impl.match_tallies
home_tallies = _impl.home_tallies


def backends():
    """Return every importable backend module, keyed by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
