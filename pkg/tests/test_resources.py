"""
Tests for resource detection.

Tests cover:
- CPU detection (affinity, fallbacks)
- Memory detection (total, available)
- Dense-oracle memory guard
"""

from unittest.mock import MagicMock, patch

import pytest

from hyperstab.errors import CapacityError
from hyperstab.resources import (
    SystemResources,
    check_dense_memory,
    default_jobs,
    detect_system_resources,
    get_cpu_info,
    get_memory_info,
)


def _resources(available_gb):
    return SystemResources(
        cpu_cores=4, cpu_arch="x86_64", total_ram_gb=16.0, available_ram_gb=available_gb
    )


class TestSystemResources:
    def test_string_representation(self):
        assert str(_resources(6.0)) == "CPU: 4 cores (x86_64) | RAM: 6.0GB/16.0GB"


class TestCPUDetection:
    @patch("hyperstab.resources.platform.machine", return_value="arm64")
    @patch("hyperstab.resources.psutil.Process")
    def test_prefers_affinity(self, mock_process, _machine):
        mock_process.return_value.cpu_affinity.return_value = [0, 1]
        assert get_cpu_info() == (2, "arm64")

    @patch("hyperstab.resources.psutil.cpu_count", return_value=6)
    @patch("hyperstab.resources.psutil.Process")
    def test_falls_back_to_core_count(self, mock_process, _count):
        mock_process.return_value.cpu_affinity.side_effect = OSError("unsupported")
        cores, _ = get_cpu_info()
        assert cores == 6

    @patch("hyperstab.resources.platform.machine", side_effect=RuntimeError("boom"))
    def test_failure_fallback(self, _machine):
        assert get_cpu_info() == (1, "unknown")

    @patch("hyperstab.resources.get_cpu_info", return_value=(8, "x86_64"))
    def test_default_jobs(self, _cpu):
        assert default_jobs() == 8


class TestMemoryDetection:
    @patch("hyperstab.resources.psutil.virtual_memory")
    def test_memory_in_gb(self, mock_memory):
        mock_memory.return_value = MagicMock(total=16 * 1024**3, available=4 * 1024**3)
        assert get_memory_info() == (16.0, 4.0)

    @patch("hyperstab.resources.psutil.virtual_memory")
    def test_available_capped(self, mock_memory):
        mock_memory.return_value = MagicMock(total=8 * 1024**3, available=9 * 1024**3)
        assert get_memory_info() == (8.0, 8.0)

    @patch("hyperstab.resources.psutil.virtual_memory", side_effect=OSError("denied"))
    def test_failure_fallback(self, _memory):
        assert get_memory_info() == (0.0, 0.0)

    def test_detect_system_resources(self):
        resources = detect_system_resources()
        assert resources.cpu_cores >= 1
        assert resources.total_ram_gb >= 0


class TestDenseMemoryCheck:
    def test_small_state_fits(self):
        check_dense_memory(2**20, _resources(1.0))

    def test_huge_state_refused(self):
        with pytest.raises(CapacityError):
            check_dense_memory(2**34, _resources(8.0))

    def test_unknown_memory_is_not_a_limit(self):
        check_dense_memory(2**40, _resources(0.0))
