"""Distantly supervised relation extraction with label-propagation
distillation over a TF-IDF bipartite mention-feature graph."""

__version__ = "0.1.0"
