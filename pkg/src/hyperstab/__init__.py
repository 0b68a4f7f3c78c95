"""hyperstab - random stabilizer tensor networks on weighted hypergraphs."""

__version__ = "0.1.0"
