"""Small covers, real moment-angle manifolds and glue-back constructions as GF(2) cell complexes."""

__version__ = "0.1.0"
