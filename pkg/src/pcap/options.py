"""Backend selection for the compiled kernels.

``PCAP_BACKEND=numpy`` forces the pure-numpy kernels; the default is numba
when it imports, numpy otherwise.
"""

import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

BACKEND = os.getenv("PCAP_BACKEND", "numba" if HAVE_NUMBA else "numpy").lower()
if BACKEND not in ("numba", "numpy"):
    raise ImportError(f"PCAP_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")
if BACKEND == "numba" and not HAVE_NUMBA:  # pragma: no cover
    BACKEND = "numpy"

NUMBA_OPTS = dict(cache=True, nogil=True, fastmath=False, error_model="numpy")
