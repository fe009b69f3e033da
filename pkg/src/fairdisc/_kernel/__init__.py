"""Kernel dispatch: compiled Cython searches with a pure-Python fallback.

The compiled extension is chosen automatically at import when it was
built and the problem fits its fixed-width integer limits; otherwise
the pure-Python kernel runs. Both backends implement the identical
algorithms (same branching order, same bounds, same node accounting),
so results are byte-for-byte interchangeable.

Set FAIRDISC_KERNEL=py or FAIRDISC_KERNEL=cy to force a backend, e.g.
for the backend-comparison benchmark.
"""

from __future__ import annotations

import os

from fairdisc._kernel import pykernel

try:
    from fairdisc._kernel import _cykernel  # type: ignore[attr-defined]
except ImportError:
    _cykernel = None

_FORCE = os.environ.get("FAIRDISC_KERNEL", "").strip().lower()
if _FORCE not in ("", "py", "cy"):
    raise RuntimeError(f"FAIRDISC_KERNEL must be 'py' or 'cy', got {_FORCE!r}")
if _FORCE == "cy" and _cykernel is None:
    raise RuntimeError("FAIRDISC_KERNEL=cy but the compiled kernel is not built")

# Fixed-width limits of the compiled kernel; the pure-Python kernel has
# no limits beyond memory.
CY_MAX_M = 30
CY_MAX_N = 16
CY_MAX_K = 16
CY_MAX_SWEEP_BITS = 22


def has_compiled() -> bool:
    return _cykernel is not None


def active_backend() -> str:
    """Name of the backend the dispatcher prefers: 'cython' or 'python'."""
    if _FORCE == "py" or _cykernel is None:
        return "python"
    return "cython"


def _compiled_ok(m: int, n: int, k: int = 1) -> bool:
    if _FORCE == "py" or _cykernel is None:
        return False
    return m <= CY_MAX_M and n <= CY_MAX_N and k <= CY_MAX_K


def disc_min(m, k, sets, budget=None):
    if _compiled_ok(m, len(sets), k):
        return _cykernel.disc_min(m, k, list(sets), -1 if budget is None else int(budget))
    return pykernel.disc_min(m, k, list(sets), budget)


def efc_search_binary(m, n, amasks, bmasks, budget=None, classes=None):
    if classes is None:
        classes = pykernel.default_classes(amasks, bmasks)
    if _compiled_ok(m, n):
        return _cykernel.efc_search_binary(
            m, n, list(amasks), list(bmasks),
            -1 if budget is None else int(budget), list(classes),
        )
    return pykernel.efc_search_binary(m, n, amasks, bmasks, budget, classes)


def lemma_sweep(n, m):
    if _compiled_ok(m, n) and n * m <= CY_MAX_SWEEP_BITS:
        return _cykernel.lemma_sweep(n, m)
    return pykernel.lemma_sweep(n, m)
