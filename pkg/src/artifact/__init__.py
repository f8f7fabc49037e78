"""
Local weights of spectral reciprocity formulas.

Modules
-------
qsymbolic
    Exact rational functions in ``q^{-s}`` with affine exponents.
geosum
    Closed forms of multi-index geometric sums over polyhedral lattices.
nonarch
    Local weights at finite places.
specfun
    Special functions on the real place.
archtrans
    Transforms and local weights at the real place.
harness
    Identity catalog and the ``artifact`` command line.
"""

__version__ = "0.1.0"
