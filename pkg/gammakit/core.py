import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, NamedTuple, Optional, Tuple, TypeVar

import numpy as np
from scipy.optimize import linear_sum_assignment

from gammakit.typing import complex_to_doc

logger = logging.getLogger(__name__)

# coefficient tolerance for symmetry checks and symmetric reduction
SYMMETRY_TOL = 1e-10
# tolerance on |root| - 1 for membership and boundary tests
DEFAULT_TOL = 1e-9
# tolerance on von Neumann margins
VN_TOL = 1e-8
# relative commuting tolerance, scaled by max ||T_i||
COMMUTING_TOL = 1e-8
# eigenvalues of a random combination closer than this (relative) form one block
CLUSTER_TOL = 1e-7
MAX_RETRIES = 5

THREADS_ENV = "GAMMAKIT_THREADS"

CPoint = np.ndarray

Item = TypeVar("Item")
Result = TypeVar("Result")


def as_cpoint(z) -> CPoint:
    if isinstance(z, GammaPoint):
        z = z.s
    point = np.array(z, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(point)):
        raise ValueError("point has non-finite coordinates: %s" % point)
    return point


class GammaPoint:
    """
    A candidate point (s_1, ..., s_n) of the symmetrized polydisc. Instances are immutable; ``s`` is a read-only
    complex vector of length n >= 1.
    """

    __slots__ = ("_s",)

    def __init__(self, s) -> None:
        super().__init__()
        point = as_cpoint(s)
        if point.size == 0:
            raise ValueError("a point of Gamma_n needs at least one coordinate")
        point.setflags(write=False)
        self._s = point

    @property
    def s(self) -> np.ndarray:
        return self._s

    @property
    def n(self) -> int:
        return self._s.size

    def __len__(self):
        return self.n

    def __getitem__(self, item):
        return self._s[item]

    def __iter__(self):
        return iter(self._s)

    def __eq__(self, other):
        if not isinstance(other, GammaPoint):
            return NotImplemented
        return self.n == other.n and bool(np.all(self._s == other._s))

    def __hash__(self):
        return hash(tuple(self._s.tolist()))

    def isclose(self, other, tol: float = DEFAULT_TOL) -> bool:
        other = other if isinstance(other, GammaPoint) else GammaPoint(other)
        return self.n == other.n and float(np.max(np.abs(self._s - other.s))) <= tol

    def to_doc(self) -> dict:
        return {"n": self.n, "s": [complex_to_doc(v) for v in self._s]}

    def __repr__(self):
        return "GammaPoint(%s)" % ", ".join("%.6g%+.6gj" % (v.real, v.imag) for v in self._s)


class Verdict(NamedTuple):
    """
    Outcome of a classifier: ``holds`` is always ``defect <= tolerance`` for the tolerance the classifier used.
    ``certificate`` carries a witness (offending root, point, polynomial or named check) when there is one.
    """

    holds: bool
    defect: float
    certificate: Any = None
    diagnostics: Tuple[str, ...] = ()

    @classmethod
    def of(cls, defect: float, tol: float, certificate=None, diagnostics=()) -> "Verdict":
        defect = max(0.0, float(defect))
        return cls(bool(defect <= tol), defect, certificate, tuple(diagnostics))


class Budget(NamedTuple):
    """Falsification budget for sampled von Neumann checks."""

    max_degree: int = 4
    random_polys: int = 64
    grid: int = 64
    refine_iters: int = 3


def match_distance(a, b) -> float:
    """
    Distance between two multisets of points (complex scalars or rows of complex vectors) under the optimal one-to-one
    matching. Returns ``inf`` when the sizes differ.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]

    if a.shape != b.shape:
        return float("inf")
    if a.size == 0:
        return 0.0

    cost = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


_executor: Optional[ThreadPoolExecutor] = None
_threads: int = 0
_lock = threading.RLock()
_worker = threading.local()


def init(threads: int = None) -> int:
    """
    Starts the process-wide worker pool used for batch evaluations (grid chunks, polynomial batteries, torus samples).
    When ``threads`` is not given, the ``GAMMAKIT_THREADS`` environment variable is used. Zero or one thread means
    serial execution.

    :return: the effective number of threads
    """
    global _executor, _threads

    with _lock:
        if threads is None:
            threads = int(os.environ.get(THREADS_ENV) or 0)
        if threads < 0:
            raise ValueError("threads must be non-negative")

        shutdown()

        if threads > 1:
            logger.debug("starting worker pool with %d threads", threads)
            _executor = ThreadPoolExecutor(
                max_workers=threads, thread_name_prefix="gammakit", initializer=_mark_worker
            )
        _threads = threads

        return threads


def shutdown():
    global _executor, _threads

    with _lock:
        _threads = 0
        if _executor is None:
            return
        logger.debug("stopping worker pool")
        _executor.shutdown(wait=True)
        _executor = None


def _mark_worker():
    _worker.active = True


def threads() -> int:
    return _threads


def parallel_map(fn: Callable[[Item], Result], items: Iterable[Item]) -> List[Result]:
    """
    Maps ``fn`` over ``items`` on the worker pool if one is running, serially otherwise. Results keep the input order.
    Calls made from inside a worker run serially, so nested batches cannot exhaust the pool.
    """
    items = list(items)
    executor = _executor

    if executor is None or len(items) < 2 or getattr(_worker, "active", False):
        return [fn(item) for item in items]

    return list(executor.map(fn, items))
