"""Tensor-rank machinery for T_k and the exact solvers for balanced
tripartitioning and set cover built on it."""

__version__ = "0.1.0"
