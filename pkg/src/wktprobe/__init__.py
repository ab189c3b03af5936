"""Probing harness for geometric attributes and spatial relations in
WKT text embeddings: ground-truth geometry kernels, dataset construction,
deterministic and provider-backed text encoders, MLP probes, and the
six-task evaluation pipeline.
"""

__version__ = "0.1.0"
