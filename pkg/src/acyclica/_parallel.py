from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("ACYCLICA_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items, workers: int | None = None):
    """Ordered map; fans out to processes when ACYCLICA_THREADS > 1.

    Results come back in input order, so output never depends on scheduling.
    """
    items = list(items)
    n = worker_count() if workers is None else workers
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(n, len(items))) as ex:
        return list(ex.map(fn, items))
