"""Compiler from a small imperative language over secret vectors to batched FHE circuits."""

from __future__ import annotations

__version__ = "0.1.0"
