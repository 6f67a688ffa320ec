"""Ontology-backed data mining toolkit for a three-tank mixing plant."""

__version__ = "0.1.0"
