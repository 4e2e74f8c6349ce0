"""Exact cospectrality of graphs under distance-type matrices."""

__version__ = "0.1.0"
