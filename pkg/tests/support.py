"""Shared random-model generators for the test batteries."""

from __future__ import annotations

import numpy as np

from ssgc import (
    InfeasibleDesignError,
    ISSModel,
    JointPartition,
    SSModel,
    Var1Design,
    design_var1,
    solve_dare,
    spectral_radius,
)


def feasible_designs(rng: np.random.Generator, count: int):
    """Rejection-sample feasible parameter tuples, real and conjugate pairs."""
    out = []
    while len(out) < count:
        if rng.random() < 0.5:
            lam1 = complex(rng.uniform(-0.95, 0.95))
            lam2 = complex(rng.uniform(-0.95, 0.95))
        else:
            mod = rng.uniform(0.2, 0.97)
            ang = rng.uniform(0.05, np.pi - 0.05)
            lam1 = mod * np.exp(1j * ang)
            lam2 = np.conj(lam1)
        design = Var1Design(
            lam1, lam2,
            xi_x=float(rng.uniform(0.0, 2.0)),
            xi_y=float(rng.uniform(0.0, 2.0)),
            rho=float(rng.uniform(-0.9, 0.9)),
            sign_gx=int(rng.choice([-1, 1])),
            sign_gy=int(rng.choice([-1, 1])),
            root_case=int(rng.choice([1, 2])),
        )
        try:
            out.append((design, design_var1(design)))
        except InfeasibleDesignError:
            continue
    return out


def stable_matrix(rng: np.random.Generator, n: int, radius: float | None = None) -> np.ndarray:
    if radius is None:
        radius = float(rng.uniform(0.3, 0.95))
    a = rng.standard_normal((n, n))
    return a * (radius / max(spectral_radius(a), 1e-12))


def random_ss(
    rng: np.random.Generator,
    n: int | None = None,
    px: int | None = None,
    py: int | None = None,
) -> SSModel:
    """Stable general-noise model whose stacked noise covariance has full rank."""
    if n is None:
        n = int(rng.integers(1, 6))
    if px is None:
        px = int(rng.integers(1, 3))
    if py is None:
        py = int(rng.integers(1, 3))
    p = px + py
    a = stable_matrix(rng, n)
    c = rng.standard_normal((p, n))
    g = rng.standard_normal((n, n + p))
    h = rng.standard_normal((p, n + p))
    return SSModel(a, c, g @ g.T, h @ h.T, g @ h.T, partition=JointPartition(px, py))


def random_iss(
    rng: np.random.Generator,
    n: int | None = None,
    px: int | None = None,
    py: int | None = None,
) -> ISSModel:
    ss = random_ss(rng, n, px, py)
    sol = solve_dare(ss)
    return ISSModel(ss.A, ss.C, sol.K, sol.V, partition=ss.partition)


def _block_diag_cov(rng: np.random.Generator, px: int, py: int) -> np.ndarray:
    gx = rng.standard_normal((px, px + 2))
    gy = rng.standard_normal((py, py + 2))
    v = np.zeros((px + py, px + py))
    v[:px, :px] = gx @ gx.T
    v[px:, px:] = gy @ gy.T
    return v


def white_x_unidirectional(
    rng: np.random.Generator,
    n: int | None = None,
    px: int | None = None,
    py: int | None = None,
) -> ISSModel:
    """x block is white noise whose innovations feed y's states.

    x causes y (the gain columns of x enter the shared state) while y never
    causes x, weakly or instantaneously: the x rows of C are zero and the
    innovation covariance is block diagonal.
    """
    if n is None:
        n = int(rng.integers(1, 5))
    if px is None:
        px = int(rng.integers(1, 3))
    if py is None:
        py = int(rng.integers(1, 3))
    p = px + py
    a = stable_matrix(rng, n, radius=float(rng.uniform(0.3, 0.9)))
    c = np.zeros((p, n))
    c[px:] = rng.standard_normal((py, n))
    k = rng.standard_normal((n, p))
    v = _block_diag_cov(rng, px, py)
    while spectral_radius(a - k @ c) >= 0.95:
        k *= 0.5
    return ISSModel(a, c, k, v, partition=JointPartition(px, py))


def triangular_unidirectional(
    rng: np.random.Generator,
    nx: int = 2,
    ny: int = 2,
    px: int = 1,
    py: int = 1,
) -> ISSModel:
    """Block-lower-triangular transition and gain, block-diagonal C and V.

    y never causes x at the model's own rate (no weak or instantaneous
    causality), but x's states feed y's.
    """
    n = nx + ny
    a = np.zeros((n, n))
    a[:nx, :nx] = rng.standard_normal((nx, nx))
    a[nx:, :nx] = rng.standard_normal((ny, nx))
    a[nx:, nx:] = rng.standard_normal((ny, ny))
    a *= float(rng.uniform(0.3, 0.9)) / max(spectral_radius(a), 1e-12)
    c = np.zeros((px + py, n))
    c[:px, :nx] = rng.standard_normal((px, nx))
    c[px:, nx:] = rng.standard_normal((py, ny))
    k = np.zeros((n, px + py))
    k[:nx, :px] = rng.standard_normal((nx, px))
    k[nx:, :px] = rng.standard_normal((ny, px))
    k[nx:, px:] = rng.standard_normal((ny, py))
    v = _block_diag_cov(rng, px, py)
    while spectral_radius(a - k @ c) >= 0.95:
        k *= 0.5
    return ISSModel(a, c, k, v, partition=JointPartition(px, py))


def toeplitz_innovations(model: ISSModel, m: int, n_lags: int = 250) -> np.ndarray:
    """Innovations covariance of the m-subsampled process by dense factorization.

    Builds the block-Toeplitz covariance of n_lags consecutive subsampled
    observations from exact autocovariances and reads the innovations
    covariance off the last diagonal block of its Cholesky factor.  Pure
    linear algebra, no Riccati recursion; the prediction horizon n_lags
    controls the (geometric) truncation error.
    """
    import ssgc

    acov = ssgc.autocovariance_of_iss(model, m * n_lags)
    p = model.p
    big = np.empty((n_lags * p, n_lags * p))
    for i in range(n_lags):
        for j in range(n_lags):
            big[i * p : (i + 1) * p, j * p : (j + 1) * p] = acov[m * (i - j)]
    chol = np.linalg.cholesky(big)
    last = chol[-p:, -p:]
    return last @ last.T
