"""Hot-kernel backend selection.

The compiled extension is preferred when present; the numpy fallback is
behaviorally identical. Set INCOMEATLAS_PURE_PYTHON=1 to force the fallback
(used by the benchmark and the backend-equivalence tests).
"""

import os

from . import _pykernels

if os.environ.get("INCOMEATLAS_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND_NAME

cumshare = _impl.cumshare
gini_pair_sum = _impl.gini_pair_sum
gini_sorted_sum = _impl.gini_sorted_sum
band_max = _impl.band_max

__all__ = ["BACKEND", "cumshare", "gini_pair_sum", "gini_sorted_sum", "band_max"]
