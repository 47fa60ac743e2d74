"""Тесты параллельного вычисления по сетке."""

import os

from trap_kohn.utils.parallel import parallel_map, worker_count


class TestWorkerCount:
    """Тесты выбора числа потоков."""

    def test_explicit(self):
        assert worker_count(3) == 3

    def test_zero_means_cpu_count(self):
        assert worker_count(0) == (os.cpu_count() or 1)

    def test_from_env(self, monkeypatch):
        """TRAP_KOHN_THREADS читается из окружения."""
        monkeypatch.setenv("TRAP_KOHN_THREADS", "2")
        assert worker_count() == 2


class TestParallelMap:
    """Тесты parallel_map."""

    def test_order_preserved(self):
        """Порядок результатов совпадает с порядком входа."""
        items = list(range(50))
        assert parallel_map(lambda x: x * x, items, threads=4) == [x * x for x in items]

    def test_single_thread(self):
        assert parallel_map(str, [1, 2], threads=1) == ["1", "2"]

    def test_empty(self):
        assert parallel_map(str, [], threads=4) == []
