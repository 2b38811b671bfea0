"""Published three-commodity reference case, bundled for regression tests.

The numbers below reproduce an externally published worked example: a fixed
expected-covariance matrix, the per-asset return statistics behind it, and
the printed factorization used for the max-variance swap.

Note on the printed factorization: the published basis matrix is NOT
orthogonal (its transpose times itself differs from the identity by ~1, and
the implied weights violate both the unit-norm and full-investment
constraints).  It is retained verbatim so the published prices can be
reproduced through the fixed-basis pricing path; the corrected factorization
comes from qr_constraint_basis and yields a different, internally consistent
metric.
"""

import numpy as np

#: fixed expected covariance matrix of the reference case (per day, T = 252)
OMEGA = np.array(
    [
        [0.00736, 0.00065, 0.00082],
        [0.00065, 0.00498, 0.00039],
        [0.00082, 0.00039, 0.00217],
    ]
)

#: daily mean returns
MU = np.array([-0.0038, 0.0317, -0.0002])

#: daily return standard deviations (their squares are the initial variances)
SIGMA0 = np.array([0.0502, 0.0267, 0.0058])

#: leverage parameters
RHO = np.array([0.8, 0.5, 0.6])

#: pairwise Brownian correlations (12, 23, 31)
GAMMA_12, GAMMA_23, GAMMA_31 = -0.0216, -0.0862, -0.0276

GAMMA = np.array(
    [
        [1.0, GAMMA_12, GAMMA_31],
        [GAMMA_12, 1.0, GAMMA_23],
        [GAMMA_31, GAMMA_23, 1.0],
    ]
)

R2 = 0.2319
R3 = 0.5721
LAMBDA = 0.4        # per day
RATE = 0.00014      # per day
HORIZON = 252.0     # days
STRIKE = 0.01
TARGET_RETURN = 0.0007

#: published upper-triangular factor of [mu 1]
PRINTED_R = np.array([[0.0319, 0.8676], [0.0, 1.4991]])

#: published basis (first two columns span (mu, 1); third printed as the normal).
#: Not orthogonal; see the module docstring.
PRINTED_P = np.array(
    [
        [-0.119, 0.7359, 0.6874],
        [0.9929, 0.0925, 0.0747],
        [-0.0063, 0.6707, 0.7417],
    ]
)

#: published solved coordinates (q1, q2) and residual magnitude
PRINTED_Q = np.array([0.0219, 0.6543])
PRINTED_RMAG = 0.7559

#: published coordinates vector used in the fixed-basis reproduction path
PRINTED_F = np.array([0.0219, 0.6543, 0.7559])

#: published weight vector PRINTED_P @ PRINTED_F
PRINTED_W = np.array([0.9985, 0.1387, 0.9994])

#: published prices at strike 0.01
PRICE_TRACE = 0.00435
PRICE_EIGENVALUE = 0.00145
TRACE_METRIC = 0.01451
EIGENVALUE_METRIC = 0.0115

#: override table for market.estimate_params reproducing the published
#: parameter set (driver specs are not published; gamma(1, 1) defaults)
PARAM_OVERRIDES = {
    "assets": [
        {"mu": float(MU[i]), "sigma0": float(SIGMA0[i]), "rho": float(RHO[i])}
        for i in range(3)
    ],
    "lambda": LAMBDA,
    "gamma": [[float(x) for x in row] for row in GAMMA],
    "r2": R2,
    "r3": R3,
    "rate": RATE,
    "horizon": HORIZON,
}
