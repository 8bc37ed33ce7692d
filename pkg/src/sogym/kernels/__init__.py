"""Hot-loop kernels: compiled core with a NumPy fallback.

Both implementations cover the same four functions:

- ``tdf_grid`` / ``tdf_points``  component implicit field evaluation
- ``heaviside`` / ``heaviside_derivative``  density projection step
- ``grid_connected``  4-connected flood search between element sets

The active ``backend`` picks, per kernel, whichever implementation wins on
the benchmark (``benchmarks/bench_kernels.py``): the elementwise field
evaluation vectorizes better in NumPy, while the branch-heavy projection
step and the queue-based flood search are several times faster compiled.
Set ``SOGYM_PURE_PYTHON=1`` to force the NumPy implementation everywhere
(the package also degrades to it automatically when the extension did not
build).
"""

import os
import types

from . import _fallback

fallback = _fallback

try:
    from .. import _kernels as compiled  # type: ignore[attr-defined]
except ImportError:
    compiled = None

if compiled is None or os.environ.get("SOGYM_PURE_PYTHON"):
    backend = _fallback
    BACKEND_NAME = "numpy"
else:
    backend = types.SimpleNamespace(
        tdf_grid=_fallback.tdf_grid,
        tdf_points=_fallback.tdf_points,
        heaviside=compiled.heaviside,
        heaviside_derivative=compiled.heaviside_derivative,
        grid_connected=compiled.grid_connected,
    )
    BACKEND_NAME = "compiled"
