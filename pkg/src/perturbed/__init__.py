"""Randomly perturbed graphs, digraphs, hypergraphs and tournaments."""

__version__ = "0.1.0"
