"""Numerical tolerances shared across the package.

Everything that decides "is this zero", "are these the same point" or
"when does an iteration stop" lives here so it can be audited in one place.
"""

# scalar root finding
BISECT_WIDTH = 1e-8
ROOT_RESIDUAL = 1e-12
NEWTON_MAX_ITER = 60
BISECT_MAX_ITER = 200
# lower edge of the bracket for the threshold temperature solve
T_CHECK_MARGIN = 1e-9

# critical points
DET_TOL = 1e-9
BOUNDARY_TOL = 1e-9
DEDUP_RADIUS = 1e-7
# merge radius for Newton candidates with |det J| below NEAR_SINGULAR_JACOBIAN
DEGENERATE_MERGE_RADIUS = 1e-5
NEAR_SINGULAR_JACOBIAN = 1e-6
MEAN_FIELD_RESIDUAL = 1e-10
CRITICAL_CHECK = 1e-8
DAMPING = 0.5
SEED_GRID = 21
RING_RADIUS = 1e-3
RING_POINTS = 64

# thermodynamic limit
TIE_TOL = 1e-10
DENSE_GRID = 401
FIELD_EPSILON = 1e-4

# finite-size oracle
SIZE_CAP = 20000
LEMMA1_SLACK = 1e-10
