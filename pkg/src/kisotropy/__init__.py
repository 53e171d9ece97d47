"""Equivariant K-theory and cohomology of isotropy actions on homogeneous spaces G/H."""

__version__ = "0.1.0"
