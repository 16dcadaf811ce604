"""Constructive procedures and explicit constants behind a diameter bound
``diam(M) < R * l(P)`` for closed hyperbolic 3-manifolds with presentation length ``l(P)``."""

from __future__ import annotations

__version__ = "0.1.0"
