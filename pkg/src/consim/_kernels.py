"""Backend selection for the shortest-delay kernel.

The compiled extension is used when it imports; set ``CONSIM_PURE_PYTHON=1``
to force the fallback.
"""

from __future__ import annotations

import os

from . import _dijkstra_py

python_dijkstra = _dijkstra_py.dijkstra

try:
    from ._dijkstra import dijkstra as compiled_dijkstra
except ImportError:  # extension not built
    compiled_dijkstra = None

if compiled_dijkstra is not None and os.environ.get("CONSIM_PURE_PYTHON", "") not in ("1", "true"):
    dijkstra = compiled_dijkstra
    BACKEND = "cython"
else:
    dijkstra = python_dijkstra
    BACKEND = "python"
