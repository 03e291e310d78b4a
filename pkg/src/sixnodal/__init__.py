"""Exact-arithmetic toolkit for six-nodal determinantal cubic threefolds,
their line families and scrolls, and the rank-2 chamber combinatorics of the
associated holomorphic symplectic fourfolds."""

__version__ = "0.1.0"
