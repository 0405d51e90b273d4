"""Maximally recoverable codes for grid-like topologies over GF(2^d)."""

from ._kernels import backend
from .gf2k import FieldSpec, make_field
from .topology import ErasurePattern, Instantiation, Topology, is_correctable_by

__version__ = "0.1.0"

__all__ = [
    "ErasurePattern",
    "FieldSpec",
    "Instantiation",
    "Topology",
    "backend",
    "is_correctable_by",
    "make_field",
]
