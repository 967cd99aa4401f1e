"""Shared test configuration.

Tiers: plain tests and ``slow`` diagnostics run by default; ``extended``
marks hours-scale full-dimension eigensolves, skipped unless
F2SPECTRA_EXTENDED=1.
"""

from __future__ import annotations

import os

import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("F2SPECTRA_EXTENDED") == "1":
        return
    gate = pytest.mark.skip(
        reason="extended tier (hours-scale dense eigensolves); set F2SPECTRA_EXTENDED=1"
    )
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(gate)
