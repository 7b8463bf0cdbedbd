"""Annotation producer and plot renderer for the image-evaluation engine.

This package sits on the other side of the engine's file formats: it
writes annotation files (JSON Lines) the engine ingests, and draws
figures from the CSV files the engine emits. It never imports the engine.
"""

__version__ = "0.1.0"
