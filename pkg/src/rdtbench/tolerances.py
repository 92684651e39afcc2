"""Central table of numerical tolerances.

Every module reads its defaults from here so that a tolerance is never
invented twice with two different values.  Lengths are relative to the
surface bounding-box diagonal unless stated otherwise.
"""

# Unit-vector norm check: |1 - |n|| must stay below this.
UNIT_NORM_TOL = 1e-12

# Relative residual allowed in geometric identities (circumcenter
# equidistance, bisector membership, duality checks).
GEOM_REL_TOL = 1e-10

# On-surface test |S(x)| < TOL_ON_SURFACE_REL * bbox_diagonal.
TOL_ON_SURFACE_REL = 1e-9

# Transversality margin below which a surface/face intersection is
# reported indeterminate instead of pass/fail (properties E and F).
TANGENCY_MARGIN = 1e-6

# Newton / bisection iteration caps for on-surface projections and
# root isolation along Voronoi edges.
MAX_NEWTON_ITER = 60
MAX_BISECT_ITER = 80

# Default number of sample points per unit length (relative to the
# local step) when scanning a Voronoi edge for surface crossings.
EDGE_SCAN_MIN_SAMPLES = 8

# Interior loop detection grid on a Voronoi 2-face (spec default).
FACE_LOOP_GRID = 32

# Curve-tracing step factor: h = min(TRACE_STEP_LFS_FACTOR * lfs,
# boundary_distance / TRACE_STEP_BOUNDARY_DIV).
TRACE_STEP_LFS_FACTOR = 0.05
TRACE_STEP_BOUNDARY_DIV = 4.0

# Dense covers guarantee every surface point is within COVER_FACTOR * h
# of a cover point (verified empirically on the catalog shapes).
COVER_FACTOR = 1.5

# Safety factor between a generation target and the certification
# target; absorbs cover discretization.
GENERATION_SAFETY = 0.95

# Matching radius (relative to trace step) used to identify a traced
# curve endpoint with a restricted vertex.
ENDPOINT_MATCH_FACTOR = 3.0

# Residual bounds for the two derived constants of the bounds module.
CELL_RATIO_RESIDUAL = 1e-14
VERTEX_RATIO_RESIDUAL = 1e-12
