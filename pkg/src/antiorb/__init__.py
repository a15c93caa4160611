"""Exact Fourier analysis of invariant functions on cyclic-quiver spaces over finite fields."""

from __future__ import annotations

__version__ = "0.1.0"
