"""blockatlas: series/block combinatorics for classical types and
lattice-theoretic torsor checks for the associated parameter spaces."""

__version__ = "0.1.0"
