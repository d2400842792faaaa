"""Collective-spin dynamics engine: accelerated adiabatic cat-state generation
in a bosonic Josephson junction via finite-size-corrected counter-diabatic
driving. Thin python layer over the C++ core."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
