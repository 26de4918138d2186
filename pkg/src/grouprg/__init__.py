"""Pseudorandom generators for group programs and block products over finite
groups, with the representation-theoretic verification toolkit and an exact
evaluation harness."""

from . import ff, groups, harness, models, polycompile, prg, reps, samplers

__all__ = ["ff", "groups", "harness", "models", "polycompile", "prg",
           "reps", "samplers"]

__version__ = "0.1.0"
