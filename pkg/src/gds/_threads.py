"""BLAS thread limiting.

Every dense operation in this package is small (d up to a few hundred), a
regime where multithreaded BLAS gains nothing and its spin-waiting workers
can starve the interpreter thread between calls. The heavy entry points
therefore run under a one-thread limit; draw-level parallelism comes from
the process pool instead.
"""

from contextlib import contextmanager

from threadpoolctl import threadpool_limits


@contextmanager
def single_threaded_blas():
    with threadpool_limits(limits=1):
        yield


def limit_blas_in_worker():
    """Persistent limit for pool workers (controller kept alive on purpose)."""
    global _WORKER_CONTROLLER
    _WORKER_CONTROLLER = threadpool_limits(limits=1)


_WORKER_CONTROLLER = None
