"""Error-controlled lossy compression of finite element coefficient data."""

__version__ = "0.1.0"
