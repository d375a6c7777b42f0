"""Forward compositions of inner functions on the unit disk.

Arcs and arc unions with exact length measure, finite Blaschke products with
exact boundary preimages, composition orbits with hyperbolic-distortion
bookkeeping, the worked example systems, and hit/measure statistics. The
heavy lifting lives in the C++ extension module.
"""

from innerlab._core import *  # noqa: F401,F403

__version__ = "0.1.0"
