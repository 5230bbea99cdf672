"""Gap-sum degree of compact sets and smooth functions with prescribed critical values."""

__version__ = "0.1.0"
