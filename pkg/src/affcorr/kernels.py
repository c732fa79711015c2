"""Batch kernels with backend selection at import.

The compiled ``_ckernels`` extension is used when it was built; otherwise
the pure-Python ``_pykernels`` module is loaded. Set ``AFFCORR_PURE_PYTHON=1``
to force the fallback.
"""

import os

import numpy as np

from . import _pykernels
from ._pykernels import (  # noqa: F401
    DEGENERATE_PLANE,
    DEGENERATE_S,
    FD_DEGENERATE,
    NEGATIVE_DEPTH,
    OK,
    RAY_PARALLEL,
)

STATUS_REASONS = {
    DEGENERATE_PLANE: "degenerate-plane",
    DEGENERATE_S: "degenerate-denominator",
    FD_DEGENERATE: "degenerate-denominator",
    RAY_PARALLEL: "ray-parallel-to-plane",
    NEGATIVE_DEPTH: "negative-depth",
}

_impl = _pykernels
BACKEND = "python"
if not os.environ.get("AFFCORR_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass


def _prepare(R, t, n, d, p1):
    f = lambda a, shape: np.ascontiguousarray(a, dtype=np.float64).reshape(shape)
    N = np.shape(d)[0]
    return f(R, (N, 9)), f(t, (N, 3)), f(n, (N, 3)), f(d, (N,)), f(p1, (N, 2))


def check_batch(R, t, n, d, p1, eps=1e-6, backend=None):
    """Run every affine route and both point transfers over N records.

    ``backend`` may be ``"cython"`` or ``"python"`` to bypass the import-time
    choice; see ``_pykernels.check_batch`` for the returned arrays.
    """
    impl = _impl
    if backend == "python":
        impl = _pykernels
    elif backend == "cython":
        from . import _ckernels as impl
    elif backend is not None:
        raise ValueError(f"unknown backend {backend!r}")
    return impl.check_batch(*_prepare(R, t, n, d, p1), float(eps))
