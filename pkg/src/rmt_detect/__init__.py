"""Random-matrix analysis of large-array sample covariance matrices and GLRT signal detection."""

__version__ = "0.1.0"
