"""
Параллельное вычисление по частотной сетке
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import structlog

from trap_kohn.config import get_settings

log = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def worker_count(threads: Optional[int] = None) -> int:
    """Число потоков: TRAP_KOHN_THREADS, 0 = по числу процессоров"""
    if threads is None:
        threads = get_settings().threads
    if threads <= 0:
        return os.cpu_count() or 1
    return threads


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Применяет fn к items в пуле потоков; порядок результатов совпадает с порядком входа"""
    items = list(items)
    workers = min(worker_count(threads), max(len(items), 1))
    if workers == 1:
        return [fn(item) for item in items]
    log.debug("parallel_map_start", workers=workers, items=len(items))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
