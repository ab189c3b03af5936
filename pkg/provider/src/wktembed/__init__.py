"""Mean-pooled transformer sequence embeddings over a small JSON protocol,
for probing how well text embeddings of WKT geometries preserve spatial
information.
"""

__version__ = "0.1.0"
