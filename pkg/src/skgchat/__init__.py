"""Conversational dataset search over a scholarly knowledge graph."""

__version__ = "0.1.0"
