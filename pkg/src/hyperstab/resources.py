"""
System resource detection for trial parallelism and dense-oracle sizing.

Classes:
    SystemResources: Dataclass representing detected system capabilities.

Functions:
    detect_system_resources: Main entry point for resource detection.
    get_cpu_info: Detect usable CPU cores and architecture.
    get_memory_info: Detect total and available RAM.
    default_jobs: Worker count used when --jobs is not given.
    check_dense_memory: Refuse dense states that cannot fit in RAM.
"""

import logging
import os
import platform
from dataclasses import dataclass
from typing import Optional, Tuple

import psutil

from hyperstab.errors import CapacityError

logger = logging.getLogger(__name__)

# complex128 amplitudes; the oracle keeps a few copies alive while projecting
BYTES_PER_AMPLITUDE = 16
DENSE_COPIES = 4


@dataclass(frozen=True)
class SystemResources:
    """Detected system hardware capabilities.

    Attributes:
        cpu_cores (int): Number of CPU cores usable by this process.
        cpu_arch (str): CPU architecture (e.g., 'arm64', 'x86_64').
        total_ram_gb (float): Total system RAM in GB.
        available_ram_gb (float): Available system RAM in GB.
    """

    cpu_cores: int
    cpu_arch: str
    total_ram_gb: float
    available_ram_gb: float

    def __str__(self) -> str:
        return (
            f"CPU: {self.cpu_cores} cores ({self.cpu_arch}) | "
            f"RAM: {self.available_ram_gb:.1f}GB/{self.total_ram_gb:.1f}GB"
        )


def get_cpu_info() -> Tuple[int, str]:
    """Detect usable CPU cores and architecture.

    Returns:
        Tuple[int, str]: (number of cores, architecture string).

    Notes:
        The CPU affinity mask is preferred over the logical core count when the
        platform exposes it. Never raises; falls back to ``(1, "unknown")``.
    """
    try:
        cores: Optional[int] = None
        if hasattr(psutil.Process, "cpu_affinity"):
            try:
                cores = len(psutil.Process().cpu_affinity())
            except (psutil.Error, OSError):
                cores = None
        cores = cores or psutil.cpu_count(logical=True) or os.cpu_count() or 1
        arch = platform.machine()
        logger.debug(f"Detected CPU: {cores} cores, {arch}")
        return cores, arch
    except Exception as e:
        logger.warning(f"CPU detection failed: {e}. Using fallback values (1 core, unknown arch).")
        return 1, "unknown"


def get_memory_info() -> Tuple[float, float]:
    """Detect total and available system RAM.

    Returns:
        Tuple[float, float]: (total RAM in GB, available RAM in GB), rounded
        to 2 decimal places. ``(0.0, 0.0)`` when detection fails.
    """
    try:
        memory = psutil.virtual_memory()
        total_gb = round(memory.total / (1024**3), 2)
        available_gb = round(memory.available / (1024**3), 2)

        if available_gb > total_gb:
            logger.warning(
                f"Available RAM ({available_gb}GB) exceeds total ({total_gb}GB). "
                "Capping available to total."
            )
            available_gb = total_gb

        logger.debug(f"Detected RAM: {available_gb}GB available / {total_gb}GB total")
        return total_gb, available_gb
    except Exception as e:
        logger.warning(f"Memory detection failed: {e}. Using fallback values (0GB).")
        return 0.0, 0.0


def detect_system_resources() -> SystemResources:
    """Detect CPU and memory resources; partial failures fall back to safe values."""
    cpu_cores, cpu_arch = get_cpu_info()
    total_ram_gb, available_ram_gb = get_memory_info()
    resources = SystemResources(
        cpu_cores=cpu_cores,
        cpu_arch=cpu_arch,
        total_ram_gb=total_ram_gb,
        available_ram_gb=available_ram_gb,
    )
    logger.debug(f"Detected resources: {resources}")
    return resources


def default_jobs() -> int:
    """Worker processes to use when none are requested: all usable cores."""
    cores, _ = get_cpu_info()
    return max(1, cores)


def check_dense_memory(dimension: int, resources: Optional[SystemResources] = None) -> None:
    """Raise CapacityError when a dense state of ``dimension`` amplitudes would not fit.

    Unknown memory (detection failed) is not treated as a limit.
    """
    resources = resources or detect_system_resources()
    if resources.available_ram_gb <= 0:
        logger.warning("Available memory unknown; skipping dense-oracle memory check")
        return
    needed_gb = dimension * BYTES_PER_AMPLITUDE * DENSE_COPIES / (1024**3)
    if needed_gb > resources.available_ram_gb:
        raise CapacityError(
            f"dense oracle needs about {needed_gb:.2f}GB, "
            f"only {resources.available_ram_gb:.2f}GB available"
        )
