"""Graph complexes of tropical moduli spaces and Culler-Vogtmann spaces."""

__version__ = "0.1.0"
