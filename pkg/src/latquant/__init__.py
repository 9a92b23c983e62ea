"""Exact and Monte Carlo tools for lattice quantizers.

The main entry points are re-exported here; submodules hold the details:
:mod:`latquant.catalog` (built-in lattices and tables), :mod:`latquant.enumeration`
(closest points, theta images, relevant vectors), :mod:`latquant.moments`
(Monte Carlo second moments), :mod:`latquant.exact_nsm` (closed-form NSM and
certified optima), :mod:`latquant.optimizer`, :mod:`latquant.equivalence`.
"""

__version__ = "0.1.0"

from .exact import BigFloat, QuadElem, Rational
from .lattice import GlueSpec, Lattice, NonLatticeError, dual, glue, gram, lll_reduce, product_scaled
from .latfile import LatticeFileError, format_lattice_file, parse_lattice_file, read_lattice_file

__all__ = [
    "BigFloat",
    "GlueSpec",
    "Lattice",
    "LatticeFileError",
    "NonLatticeError",
    "QuadElem",
    "Rational",
    "__version__",
    "dual",
    "format_lattice_file",
    "glue",
    "gram",
    "lll_reduce",
    "parse_lattice_file",
    "product_scaled",
    "read_lattice_file",
]
