"""Backend selection: compiled extension when built, numpy fallback otherwise.

Set DPPQUAD_BACKEND=python to force the fallback (used by the benchmark and
the agreement tests).
"""

import os

from . import _purecore

if os.environ.get("DPPQUAD_BACKEND", "").lower() == "python":
    _impl = _purecore
    BACKEND_NAME = "python"
else:
    try:
        from . import _fastcore as _impl  # type: ignore[attr-defined]

        BACKEND_NAME = "compiled"
    except ImportError:
        _impl = _purecore
        BACKEND_NAME = "python"

periodic_kernel_matrix = _impl.periodic_kernel_matrix
gaussian_kernel_matrix = _impl.gaussian_kernel_matrix
periodic_features_1d = _impl.periodic_features_1d
hermite_features_1d = _impl.hermite_features_1d


def backend_name() -> str:
    return BACKEND_NAME
