"""Group-fair post-processing of binary classifier scores.

Thin re-export of the compiled core. The extension lives inside the
package in wheel installs and on sys.path in build-tree test runs.
"""

try:
    from ._rocpost import *  # noqa: F401,F403
    from . import _rocpost as _core
except ImportError:  # build tree: extension sits next to the package dir
    from _rocpost import *  # noqa: F401,F403
    import _rocpost as _core

__doc__ = _core.__doc__
__all__ = [name for name in dir(_core) if not name.startswith("_")]
