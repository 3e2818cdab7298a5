"""raylat: counting integral ideals in narrow ray classes two ways.

A fundamental-domain lattice-point method with fully explicit main term
and error bound, and an independent brute-force ideal-census oracle,
verified against each other at desk scale.
"""

__version__ = "0.1.0"
