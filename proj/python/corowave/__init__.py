"""Numerical laboratory for stochastically forced corotational wave maps."""

try:
    from .corowave_native import *  # noqa: F401,F403  (installed wheel layout)
    from .corowave_native import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension on PYTHONPATH
    from corowave_native import *  # noqa: F401,F403
    from corowave_native import __version__  # noqa: F401
