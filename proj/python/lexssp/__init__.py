"""Lexicographically optimal policies for stochastic shortest path problems.

The heavy lifting lives in the compiled extension module ``_lexssp``; this
package re-exports its functional surface.
"""

try:
    from ._lexssp import *  # noqa: F401,F403
    from ._lexssp import __version__  # noqa: F401
except ImportError:  # running against a build tree: extension not in-package
    from _lexssp import *  # noqa: F401,F403
    from _lexssp import __version__  # noqa: F401
