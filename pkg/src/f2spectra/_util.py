"""Small shared helpers."""

from __future__ import annotations

import os


def resolve_threads(threads: int | None) -> int:
    """Worker count: explicit argument, else F2SPECTRA_THREADS, else 1."""
    if threads is None:
        threads = int(os.environ.get("F2SPECTRA_THREADS", "1"))
    if threads < 1:
        raise ValueError("thread count must be at least 1")
    return threads
