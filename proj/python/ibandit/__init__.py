"""Incentive-aware recommendation simulator (pybind11 bindings)."""

try:
    from ._ibandit import *  # noqa: F401,F403  (installed package layout)
except ImportError:
    from _ibandit import *  # noqa: F401,F403  (build-tree layout)
