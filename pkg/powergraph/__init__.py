"""
Lossless power graph decompositions of directed graphs: a Jaccard
clustering baseline, beam search and exact branch-and-bound search, with
brute-force oracles, ILP and CP model writers, a scale-free graph generator
and a benchmark harness.
"""

from powergraph.version import __version__

__all__ = ["__version__"]
