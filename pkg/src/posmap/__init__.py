"""Linear maps between matrix algebras: positivity classes, faces, minorants and decompositions."""

__version__ = "0.1.0"
