"""Continuous subgraph matching over streams of edge updates."""

from .graph import EdgeUpdate, LabeledGraph, UpdateStream, load_graph, load_stream
from .query import QueryGraph, load_query

__all__ = ["EdgeUpdate", "LabeledGraph", "QueryGraph", "UpdateStream",
           "load_graph", "load_query", "load_stream"]
