"""Restricted Delaunay triangulations of sampled implicit surfaces.

Pipeline: sample a surface, build the 3D Delaunay/Voronoi pair, trace
the restricted Voronoi diagram on the surface, dualize it into a mesh,
and audit the sampling-theory properties that certify the result.
"""

__version__ = "0.1.0"
