"""Elementary-type pro-p constructions, their homomorphisms into finite p-groups,
and symbol-length bounds for pulled-back cohomology classes."""

__version__ = "0.1.0"
