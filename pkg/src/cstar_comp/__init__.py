"""Composition-operator C*-algebras of Fuchsian groups, numerically."""

__version__ = "0.1.0"
