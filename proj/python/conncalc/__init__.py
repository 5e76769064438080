"""Connection calculus for biunitary connections on four-graph squares.

Thin python surface over the C++ core: file-level operations (check,
compose, dual, equiv, decompose, ...) plus the two verification pipelines.
"""

import os
from pathlib import Path

try:
    from ._conncalc import *  # noqa: F401,F403  (installed wheel layout)
    from . import _conncalc as _impl
except ImportError:  # build-tree layout: module on PYTHONPATH
    from _conncalc import *  # noqa: F401,F403
    import _conncalc as _impl


def data_dir() -> str:
    """Bundled data directory (env CONNCALC_DATA wins, then the packaged copy)."""
    env = os.environ.get("CONNCALC_DATA")
    if env:
        return env
    packaged = Path(__file__).parent / "data"
    if packaged.is_dir():
        os.environ["CONNCALC_DATA"] = str(packaged)
        return str(packaged)
    return "data"


# resolve the packaged data directory on import so verify() works out of the box
data_dir()

__all__ = [n for n in dir(_impl) if not n.startswith("_")] + ["data_dir"]
