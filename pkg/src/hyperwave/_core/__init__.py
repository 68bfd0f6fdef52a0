"""Backend selection for the radial eigenfunction engine.

Two implementations of the same contract live here:

* ``_compiled`` -- Cython extension, one adaptive march per eigenvalue.
  Fastest for small or scattered batches, and parallelizes across
  eigenvalue chunks (the march releases the GIL).
* ``_fallback`` -- pure NumPy, one shared-step march for the whole batch.
  Fastest for very large batches, where vectorization wins over the
  per-eigenvalue step-count advantage.

The compiled extension is picked at import time when it built successfully;
HYPERWAVE_BACKEND=python|compiled overrides. With the compiled backend
active, batches larger than ``BATCH_CROSSOVER`` still route to the
vectorized path unless the override pins the extension, since that is the
faster engine there (see benchmarks/bench_backends.py).
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import util
from . import _fallback

try:
    from . import _compiled

    HAVE_COMPILED = True
except ImportError:  # extension not built; pure python still fully functional
    _compiled = None
    HAVE_COMPILED = False

_FORCED = os.environ.get("HYPERWAVE_BACKEND", "").strip().lower()
if _FORCED not in ("", "python", "compiled"):
    raise ImportError(f"HYPERWAVE_BACKEND must be 'python' or 'compiled', got {_FORCED!r}")
if _FORCED == "compiled" and not HAVE_COMPILED:
    raise ImportError("HYPERWAVE_BACKEND=compiled but the extension is not built")

BACKEND = "compiled" if (HAVE_COMPILED and _FORCED != "python") else "python"

# Above this batch size the shared-step vectorized path wins; measured with
# benchmarks/bench_backends.py on the dev machine.
BATCH_CROSSOVER = 192
_MIN_CHUNK = 16


def _use_compiled(n_ev):
    if BACKEND != "compiled":
        return False
    if _FORCED == "compiled":
        return True
    return n_ev <= BATCH_CROSSOVER


def _chunks(n, workers):
    size = max(_MIN_CHUNK, -(-n // workers))
    return [(i, min(i + size, n)) for i in range(0, n, size)]


def _threaded(fn, ev, assemble_axis):
    """Run fn over ev chunks in a thread pool; concatenate in chunk order."""
    workers = util.worker_count()
    n = len(ev)
    if workers <= 1 or n < 2 * _MIN_CHUNK:
        return fn(ev)
    spans = _chunks(n, workers)
    if len(spans) <= 1:
        return fn(ev)
    with ThreadPoolExecutor(max_workers=min(workers, len(spans))) as pool:
        parts = list(pool.map(lambda s: fn(ev[s[0]:s[1]]), spans))
    return np.concatenate(parts, axis=assemble_axis)


def phi_table(m1, m2, ev, t_out, rtol=1e-10):
    """phi_lambda(t) on the (ev, t_out) product grid; shape (n_ev, n_t)."""
    ev = np.asarray(ev, dtype=float).ravel()
    if _use_compiled(ev.size):
        return _threaded(
            lambda chunk: _compiled.phi_table(m1, m2, chunk, t_out, rtol), ev, 0
        )
    return _fallback.phi_table(m1, m2, ev, t_out, rtol)


def phi_sum_t(m1, m2, ev, t_nodes, coef, rtol=1e-10):
    """Contract phi over radius nodes: sum_i coef[p,i] phi_ev(t_i) -> (n_p, n_ev)."""
    ev = np.asarray(ev, dtype=float).ravel()
    if _use_compiled(ev.size):
        return _threaded(
            lambda chunk: _compiled.phi_sum_t(m1, m2, chunk, t_nodes, coef, rtol), ev, 1
        )
    return _fallback.phi_sum_t(m1, m2, ev, t_nodes, coef, rtol)


def phi_sum_ev(m1, m2, ev, wcoef, t_out, rtol=1e-10):
    """Contract phi over eigenvalues: sum_j wcoef[p,j] phi_j(t) -> (n_p, n_t)."""
    ev = np.asarray(ev, dtype=float).ravel()
    wcoef = np.atleast_2d(np.asarray(wcoef))
    if _use_compiled(ev.size):
        workers = util.worker_count()
        if workers > 1 and ev.size >= 2 * _MIN_CHUNK:
            spans = _chunks(ev.size, workers)
            if len(spans) > 1:
                with ThreadPoolExecutor(max_workers=min(workers, len(spans))) as pool:
                    parts = list(
                        pool.map(
                            lambda s: _compiled.phi_sum_ev(
                                m1, m2, ev[s[0]:s[1]], wcoef[:, s[0]:s[1]], t_out, rtol
                            ),
                            spans,
                        )
                    )
                out = parts[0]
                for part in parts[1:]:
                    out = out + part
                return out
        return _compiled.phi_sum_ev(m1, m2, ev, wcoef, t_out, rtol)
    return _fallback.phi_sum_ev(m1, m2, ev, wcoef, t_out, rtol)
