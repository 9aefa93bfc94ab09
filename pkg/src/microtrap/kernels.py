"""Backend selection for the hot kernels.

Prefers the compiled extension; falls back to the numpy reference
implementation when the extension is unavailable or when
MICROTRAP_PURE_PYTHON is set. Both backends implement the same functions
with matching numerics.
"""

import os

from . import _kernels_ref

if os.environ.get("MICROTRAP_PURE_PYTHON"):
    _impl = _kernels_ref
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_ref
        BACKEND = "python"

segment_fields = _impl.segment_fields
infinite_wire_fields = _impl.infinite_wire_fields
noise_samples = _impl.noise_samples

reference = _kernels_ref


def backend_name() -> str:
    return BACKEND
