"""Selects the shortest-path kernel at import time.

The compiled extension (`factflow._spath`, built from Cython) is preferred;
the pure-Python fallback is picked up transparently when the extension was
not built. Set FACTFLOW_PURE_PYTHON=1 to force the fallback, e.g. to compare
the two with benchmarks/bench_kernel.py.
"""

import os

if os.environ.get("FACTFLOW_PURE_PYTHON"):
    from . import _spath_py as _impl
else:
    try:
        from . import _spath as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _spath_py as _impl  # type: ignore[no-redef]

dijkstra_residual = _impl.dijkstra_residual
KERNEL_IMPLEMENTATION = _impl.IMPLEMENTATION
HAVE_COMPILED_KERNEL = KERNEL_IMPLEMENTATION == "compiled"
