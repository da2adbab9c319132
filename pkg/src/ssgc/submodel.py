"""Marginal (block) models of a joint innovations model.

A stationary joint ISS model (A, C, K, V) restricted to one output block is
again an ISS process on the same state: keeping rows `idx` of the output, the
block model solves the DARE of the state-space pair

    (A, C_idx, [B_e B_e^T, V_idx, K V[:, idx]]),   B_e = K chol(V),

whose innovation covariance is the block's one-step prediction error
covariance given its own past only.
"""

from __future__ import annotations

import numpy as np

from .dare import solve_dare
from .model import ISSModel, SpectralCurve, require_stationary, spectrum_of_iss

__all__ = ["extract_submodel", "submodel_spectrum", "log_det_spectrum_integral"]


def _marginal_model(joint: ISSModel, idx: np.ndarray, tol: float | None = None) -> ISSModel:
    from .model import SSModel

    c_sub = joint.C[idx, :]
    r_sub = joint.V[np.ix_(idx, idx)]
    s_sub = joint.K @ joint.V[:, idx]
    b_e = joint.K @ np.linalg.cholesky(joint.V)
    q = b_e @ b_e.T
    ss = SSModel(joint.A, c_sub, 0.5 * (q + q.T), r_sub, s_sub)
    sol = solve_dare(ss) if tol is None else solve_dare(ss, tol=tol)
    return ISSModel(joint.A, c_sub, sol.K, sol.V, partition=None)


def extract_submodel(joint: ISSModel, block: str = "x") -> ISSModel:
    """ISS model of one output block of a stationary joint model.

    Parameters
    ----------
    joint : ISSModel
        Partitioned stationary joint model.
    block : {"x", "y"}
        Which output block to keep.

    Returns
    -------
    ISSModel
        Marginal model (A, C_block, K_block, Omega_block); its V is the
        block's own innovation covariance Omega, with Omega >= V_block in the
        PSD order.
    """
    part = joint.require_partition()
    require_stationary(joint)
    if block == "x":
        idx = np.arange(part.px)
    elif block == "y":
        idx = np.arange(part.px, part.p)
    else:
        raise ValueError("block must be 'x' or 'y'")
    return _marginal_model(joint, idx)


def submodel_spectrum(sub: ISSModel, grid: np.ndarray | None = None) -> SpectralCurve:
    """Spectrum of an extracted block model (plain ISS spectrum)."""
    return spectrum_of_iss(sub, grid)


def log_det_spectrum_integral(curve: SpectralCurve) -> float:
    """Normalized integral of ln det over a periodic spectral curve.

    Computes (1/2pi) * integral of ln det f(lambda) d lambda by the trapezoid
    rule on the periodic grid; for the matrix curve of a regular process this
    equals the log determinant of its innovation covariance.

    Raises
    ------
    ValueError
        If the curve is not strictly positive (definite) at every grid point.
    """
    if curve.is_scalar:
        vals = curve.values
        if np.any(vals <= 0.0):
            raise ValueError("curve must be strictly positive at every grid point")
        logdets = np.log(vals)
    else:
        signs, logabs = np.linalg.slogdet(curve.values)
        if np.any(~np.isfinite(logabs)) or np.any(signs.real <= 0.0) or np.any(
            np.abs(signs.imag) > 1e-8
        ):
            raise ValueError("curve must be strictly positive definite at every grid point")
        logdets = logabs

    lam = curve.grid
    # Periodic trapezoid weights; reduces to the plain mean on a uniform grid.
    gaps = np.diff(np.concatenate([lam, [lam[0] + 2.0 * np.pi]]))
    weights = 0.5 * (gaps + np.roll(gaps, 1))
    return float(np.sum(weights * logdets) / (2.0 * np.pi))
