"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise the
numpy implementation is used.  Set ``POOLTILE_KERNELS=python`` to force
the fallback (``=compiled`` makes a missing extension an error).
"""

import os

from . import _pykernels as python

_choice = os.environ.get("POOLTILE_KERNELS", "auto").lower()

compiled = None
if _choice != "python":
    try:
        from . import _ckernels as compiled
    except ImportError:
        if _choice == "compiled":
            raise

active = compiled if compiled is not None else python
BACKEND = "compiled" if active is compiled else "python"

apply_pauli = active.apply_pauli
apply_rotation = active.apply_rotation
apply_pauli_sum = active.apply_pauli_sum
expectation = active.expectation
pool_gradients = active.pool_gradients
ansatz_state = active.ansatz_state
energy_and_gradient = active.energy_and_gradient
closure = active.closure

__all__ = [
    "BACKEND", "active", "compiled", "python",
    "apply_pauli", "apply_rotation", "apply_pauli_sum", "expectation",
    "pool_gradients", "ansatz_state", "energy_and_gradient", "closure",
]
