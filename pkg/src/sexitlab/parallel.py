"""Order-preserving parallel map whose results never depend on worker count.

Work items must be self-seeding (see seeds.py); this module only fans them
out and collects results in submission order, with optional progress/cancel
hooks between items.
"""
from __future__ import annotations

import multiprocessing


class Cancelled(RuntimeError):
    """Raised when a progress callback asks the run to stop."""


def _context():
    methods = multiprocessing.get_all_start_methods()
    return multiprocessing.get_context("fork" if "fork" in methods else "spawn")


def parallel_map(fn, items, workers: int = 1, progress=None):
    """Map fn over items, in order; progress(done, total) -> False cancels."""
    items = list(items)
    total = len(items)
    if workers is None:
        workers = 1
    if workers <= 1 or total <= 1:
        out = []
        for i, item in enumerate(items):
            out.append(fn(item))
            if progress is not None and progress(i + 1, total) is False:
                raise Cancelled("cancelled between work items")
        return out

    chunk = max(1, total // (workers * 8))
    out = []
    with _context().Pool(processes=min(workers, total)) as pool:
        try:
            for i, res in enumerate(pool.imap(fn, items, chunksize=chunk)):
                out.append(res)
                if progress is not None and progress(i + 1, total) is False:
                    pool.terminate()
                    raise Cancelled("cancelled between work items")
        finally:
            pool.close()
    return out
