"""Checks that output locations for traces and CSV files are usable."""

from __future__ import annotations

import os
import shutil
from pathlib import Path
from typing import Iterable, Optional, Union


class EnvironmentValidationError(RuntimeError):
    """Raised when an output file cannot be written where it was requested."""


PathLike = Union[str, Path]


def _directory_error(path: Path) -> Optional[str]:
    parent = path.parent
    if path.is_dir():
        return f"Путь '{path}' является каталогом, ожидается файл."
    if not parent.exists():
        return f"Каталог '{os.path.abspath(parent)}' не существует."
    if not os.access(parent, os.W_OK):
        return f"Нет прав на запись в каталог '{os.path.abspath(parent)}'."
    return None


def _disk_space_error(path: Path, min_free_mb: float) -> Optional[str]:
    try:
        usage = shutil.disk_usage(path)
    except FileNotFoundError:
        return (
            "Невозможно определить свободное место: "
            f"путь '{os.path.abspath(path)}' не существует."
        )

    free_mb = usage.free / (1024**2)
    if free_mb < min_free_mb:
        return (
            "Недостаточно свободного места на диске: "
            f"доступно {free_mb:.1f} МБ, требуется не менее {min_free_mb:.1f} МБ."
        )
    return None


def validate_output_paths(
    paths: Iterable[Optional[PathLike]],
    *,
    min_free_mb: float = 10.0,
) -> None:
    """Validate every requested output file before a long run starts.

    Args:
        paths: Output files; ``None`` entries (outputs not requested) are skipped.
        min_free_mb: Free space required on each target filesystem.

    Raises:
        EnvironmentValidationError: If one or more checks fail.
    """

    errors: list[str] = []
    for raw in paths:
        if raw is None:
            continue
        path = Path(raw)
        error = _directory_error(path)
        if error is None:
            error = _disk_space_error(path.parent, min_free_mb)
        if error:
            errors.append(error)

    if errors:
        joined = "\n".join(errors)
        raise EnvironmentValidationError("Ошибки проверки окружения:\n" f"{joined}")


__all__ = ["EnvironmentValidationError", "validate_output_paths"]
