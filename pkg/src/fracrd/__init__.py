"""Numerical toolkit for nonlocal-in-time, nonlocal-in-space
reaction-diffusion dynamics with competitive saturation.

Layout:

* :mod:`fracrd.special_functions`: Mittag-Leffler evaluation.
* :mod:`fracrd.fractional_time`: memory-kernel time stepping and a priori
  bound calculators.
* :mod:`fracrd.spatial_operators`: nonlocal p-Laplacian, seminorms,
  convolution, empirical constants.
* :mod:`fracrd.eigen`: principal eigenpairs of the nonlocal operators.
* :mod:`fracrd.evolution`: coupled time integrators and trajectories.
* :mod:`fracrd.diagnostics`: energy, decay, blow-up and regularity checks.
* :mod:`fracrd.verify`: named check suites feeding the verification matrix.
* :mod:`fracrd.cli`: command-line front end.
"""

from . import errors
from ._accel import USE_NUMBA, backend_name

__version__ = "0.1.0"

__all__ = ["errors", "USE_NUMBA", "backend_name", "__version__"]
