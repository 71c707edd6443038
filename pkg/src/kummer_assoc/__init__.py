"""Exact and numerical tools for counting associative submanifolds in
resolutions of flat G2 orbifolds with ADE singular strata."""

__version__ = "0.1.0"
