"""Boundary operators of holed flat tori and their degeneration data."""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import Error  # noqa: F401
except ImportError:
    # Development layout: _core sits on PYTHONPATH next to the build tree.
    from _core import *  # noqa: F401,F403
    from _core import Error  # noqa: F401

__version__ = "0.1.0"
