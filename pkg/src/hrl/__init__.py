"""Sharp constants, extremal profiles, and numerical verification for
weighted radial inequalities of Hardy and Rellich type.

The package is organized around a one-dimensional reduction: radial
functions are transported to the line by r = exp(-s), power-weighted
integrals become flat Lebesgue integrals, and the inequalities turn into
constant-coefficient variational problems whose sharp values and
(non-)attainment are known in closed form.

Modules
-------
params      problem parameters and derived scalar constants
numerics    quadrature, grids, finite differences
functions   line profiles (bumps, Gaussians, cosh powers) with derivatives
closed_forms explicit extremal functions and their sharp values
emden       the radial <-> line transport and operator factorizations
variational one-dimensional quotients and the projected-gradient minimizer
residuals   pointwise Euler-Lagrange residuals and conservation laws
records     canonical JSON / CSV serialization of results
service     HTTP API exposing the toolkit
cli         command line front end
"""

__version__ = "0.1.0"

from .params import ProblemParams, ConstantReport  # noqa: F401
