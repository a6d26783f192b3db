import os
from multiprocessing import cpu_count

from powergraph.logger import get_logger

log = get_logger(__name__)

WORKERS_ENV = "POWERGRAPH_WORKERS"


def get_worker_count() -> int:
    """Number of benchmark worker processes.

    Taken from ``POWERGRAPH_WORKERS`` when it holds a positive integer,
    otherwise one less than the number of CPUs (at least one).
    """
    value = os.environ.get(WORKERS_ENV)
    if value is not None:
        try:
            workers = int(value)
        except ValueError:
            workers = 0
        if workers >= 1:
            return workers
        msg = f"ignoring {WORKERS_ENV}={value!r}, expected a positive integer"
        log.warning(msg)
    return max(cpu_count() - 1, 1)
