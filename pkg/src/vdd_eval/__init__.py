"""Evaluation engine for AI-generated biblical images.

Ingests per-image annotation records (person detections, gender, age
ranges, sentiment), groups them into (generator, prompt) slices, and
scores each slice against a base of reference paintings. The engine
never touches pixels; annotation files are its only input about images.
"""

__version__ = "0.1.0"
