"""Exact stability analysis of maximal-regularity spline time discretizations."""

__version__ = "0.1.0"
