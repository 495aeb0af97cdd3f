"""Planar valued constraint satisfaction: plane instances, planar expressibility
and tractability classification for Boolean and conservative languages."""

from .core import INF, Language, MultimorphismCandidate, OpTable, WeightedRelation, ext

__all__ = ["INF", "Language", "MultimorphismCandidate", "OpTable", "WeightedRelation", "ext"]
__version__ = "0.1.0"
