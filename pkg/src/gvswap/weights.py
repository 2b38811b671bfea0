"""Constrained max-variance weight construction.

The contract's metric is the maximum of w' Omega w over unit-norm, fully
invested weight vectors with a prescribed expected return:

    max w' Omega w   s.t.   w'w = 1,  sum(w) = 1,  mu'w = k.

With three assets and the two linear constraints A'w = b, A = [mu 1],
b = (k, 1), the feasible set is the intersection of a line's orthogonal
complement with the unit sphere: after the QR factorization A = P [R; 0],
feasible unit vectors are w = P (q_1, q_2, +-sqrt(1 - |q|^2)) with
q = R^(-T) b, leaving a single sign to optimize.  Both signs are evaluated
and the maximizing one returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintDegeneracyError, InfeasibleTargetError, ParameterError


@dataclass(frozen=True)
class ConstraintBasis:
    """Orthogonal factorization of the constraint matrix [mu 1].

    p : (3, 3) orthogonal; first two columns span (mu, 1), last is the unit
        normal.  r : (2, 2) upper triangular with nonnegative diagonal.
    """

    p: np.ndarray
    r: np.ndarray
    mu: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class FeasibleWeights:
    q: np.ndarray        # (2,) = r^(-T) b
    rmag: float          # sqrt(1 - |q|^2)
    f: np.ndarray        # (3,) coordinates in the basis, third component signed
    w: np.ndarray        # (3,) = p @ f
    objective: float     # w' Omega w at the returned sign


def qr_constraint_basis(mu, k: float) -> ConstraintBasis:
    """QR-factorize A = [mu 1] and return the full orthogonal basis.

    Raises ConstraintDegeneracyError when mu is (numerically) proportional to
    the ones vector, which collapses the constraint set.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (3,):
        raise ParameterError(f"expected three expected returns, got shape {mu.shape}")
    a = np.column_stack([mu, np.ones(3)])
    q_full, r_full = np.linalg.qr(a, mode="complete")
    # sign convention: nonnegative diagonal of R
    for col in range(2):
        if r_full[col, col] < 0.0:
            r_full[col, :] *= -1.0
            q_full[:, col] *= -1.0
    r = r_full[:2, :2]
    scale = max(float(np.abs(a).max()), 1e-300)
    if min(abs(r[0, 0]), abs(r[1, 1])) <= 1e-12 * scale:
        raise ConstraintDegeneracyError(
            "constraint matrix [mu 1] is rank deficient: expected returns are "
            "proportional to the ones vector"
        )
    return ConstraintBasis(p=q_full, r=r, mu=mu, b=np.array([float(k), 1.0]))


def attainable_target_interval(basis: ConstraintBasis) -> tuple[float, float]:
    """Interval of target returns k for which |q(k)| <= 1."""
    rt = basis.r.T
    u = np.linalg.solve(rt, np.array([1.0, 0.0]))
    v = np.linalg.solve(rt, np.array([0.0, 1.0]))
    # |k u + v|^2 <= 1
    aa = float(u @ u)
    bb = 2.0 * float(u @ v)
    cc = float(v @ v) - 1.0
    disc = bb * bb - 4.0 * aa * cc
    if disc < 0.0:
        return (math.nan, math.nan)
    root = math.sqrt(disc)
    return ((-bb - root) / (2.0 * aa), (-bb + root) / (2.0 * aa))


def feasible_weights(basis: ConstraintBasis, omega) -> FeasibleWeights:
    """Construct the feasible weights and pick the sign maximizing w' Omega w."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (3, 3):
        raise ParameterError(f"covariance matrix must be 3x3, got shape {omega.shape}")
    q = np.linalg.solve(basis.r.T, basis.b)
    qq = float(q @ q)
    if qq > 1.0 + 1e-12:
        lo, hi = attainable_target_interval(basis)
        raise InfeasibleTargetError(
            f"target return {basis.b[0]} not attainable on the unit sphere "
            f"(|q|^2 = {qq:.6f} > 1); attainable k interval: [{lo:.6g}, {hi:.6g}]",
            k_interval=(lo, hi),
        )
    rmag = math.sqrt(max(1.0 - qq, 0.0))
    best = None
    for sign in (1.0, -1.0):
        f = np.array([q[0], q[1], sign * rmag])
        w = basis.p @ f
        objective = float(w @ omega @ w)
        if best is None or objective > best.objective:
            best = FeasibleWeights(q=q, rmag=rmag, f=f, w=w, objective=objective)
    return best
