"""Directional spreading for the two-species strong-competition Lotka-Volterra system.

Subpackages and modules:

* :mod:`lvspread.geometry` - direction sets, speed profiles, spreading sets, hypothesis checks
* :mod:`lvspread.oracle` - brute-force references for the geometry
* :mod:`lvspread.fronts` - scalar front speeds and assumption gates
* :mod:`lvspread.simulator` - explicit finite-difference solver on a 2D grid
* :mod:`lvspread.measurement` - front tracking and prediction/simulation comparison
* :mod:`lvspread.cli` - scenario-driven command line
"""

__version__ = "0.1.0"
