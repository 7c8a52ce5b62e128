"""Deciders for balanced tripartitioning and the set cover reduction."""
