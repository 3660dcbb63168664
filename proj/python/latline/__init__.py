"""Phase-stabilized optical-lattice fields, Bloch-band tunneling widths and
Rayleigh-peak lineshape fitting."""

from ._core import *  # noqa: F401,F403

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
