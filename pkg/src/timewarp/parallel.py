"""Ordered map with optional thread-pool fan-out.

Grid-search cells and per-signal solves inside an alignment or clustering
round are independent, so they may run on worker threads; results always
come back in input order, so parallel and sequential runs are identical.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

__all__ = ["parallel_map"]


def parallel_map(fn, items, n_jobs: int = 1):
    """Apply ``fn`` to each item, preserving order.

    ``n_jobs=1`` runs sequentially; ``n_jobs>1`` uses that many worker
    threads; ``n_jobs<=0`` lets the pool pick its default size.
    """
    items = list(items)
    if n_jobs == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = None if n_jobs <= 0 else n_jobs
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
