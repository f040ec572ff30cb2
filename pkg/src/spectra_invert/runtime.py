"""Process-level runtime knobs."""

from __future__ import annotations

import os

__all__ = ["thread_count"]


def thread_count() -> int:
    """Worker-thread cap from SPECTRA_INVERT_THREADS; 0 or unset means auto."""
    raw = os.environ.get("SPECTRA_INVERT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"SPECTRA_INVERT_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError("SPECTRA_INVERT_THREADS must be nonnegative")
    if n == 0:
        return os.cpu_count() or 1
    return n
