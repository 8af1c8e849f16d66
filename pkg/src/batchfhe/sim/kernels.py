"""Picks the tape executor: the compiled extension when built, else numpy.

Set ``BATCHFHE_PURE_PYTHON=1`` to force the numpy version.
"""

from __future__ import annotations

import os

if os.environ.get("BATCHFHE_PURE_PYTHON") == "1":
    from ._kernels_py import run_tape

    BACKEND = "python"
else:
    try:
        from ._kernels import run_tape  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._kernels_py import run_tape  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["run_tape", "BACKEND"]
