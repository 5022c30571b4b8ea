"""Computation engine for finite p-group trees: pc presentations, covering
groups, descendant enumeration, transfer invariants, and tree bookkeeping."""

from .pcgroup import PcPresentation, parse_pc, format_pc

__all__ = ["PcPresentation", "parse_pc", "format_pc"]
__version__ = "0.1.0"
