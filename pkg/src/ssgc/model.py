"""Core state-space model types and structural tests.

The central object is the innovations state-space (ISS) model

    x[t+1] = A x[t] + K e[t]
    z[t]   = C x[t] + e[t],      cov(e) = V,

together with the general noise-parameterized form (A, C, [Q, R, S]) used as
input to the Riccati solver.  This module also provides PBH controllability,
stabilizability and detectability tests, VAR-to-ISS conversion, transfer
function and spectral evaluation, and autocovariance sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, PreconditionError

# |eigenvalue| >= 1 - STABILITY_MARGIN counts as unstable / non-stationary.
STABILITY_MARGIN = 1e-12
# Scale-aware orthogonality threshold for the PBH eigenvector test.
PBH_TOL = 1e-9
LYAPUNOV_TOL = 1e-13
LYAPUNOV_MAX_DOUBLINGS = 200
DEFAULT_GRID_SIZE = 4096

__all__ = [
    "JointPartition",
    "SSModel",
    "ISSModel",
    "SpectralCurve",
    "AutocovarianceSequence",
    "Check",
    "ValidationReport",
    "PbhResult",
    "default_grid",
    "pbh_test",
    "validate_iss",
    "var_to_iss",
    "spectrum_of_iss",
    "autocovariance_of_iss",
    "solve_lyapunov",
    "spectral_radius",
]


def _as_matrix(value, name: str) -> np.ndarray:
    m = np.array(value, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    m.setflags(write=False)
    return m


def _check_symmetric(m: np.ndarray, name: str, tol: float = 1e-8) -> np.ndarray:
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    if np.abs(m - m.T).max(initial=0.0) > tol * scale:
        raise ValueError(f"{name} must be symmetric")
    sym = 0.5 * (m + m.T)
    sym.setflags(write=False)
    return sym


def spectral_radius(a: np.ndarray) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    return float(np.abs(np.linalg.eigvals(a)).max()) if a.size else 0.0


def default_grid(n: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """Uniform frequency grid of n points on [-pi, pi), endpoint excluded."""
    if n < 2:
        raise ValueError("grid needs at least 2 points")
    return -np.pi + 2.0 * np.pi * np.arange(n) / n


@dataclass(frozen=True)
class JointPartition:
    """Split of a p-dimensional output into a leading X block and a trailing Y block."""

    px: int
    py: int

    def __post_init__(self) -> None:
        if self.px < 1 or self.py < 1:
            raise ValueError("both blocks of a partition must be non-empty")

    @property
    def p(self) -> int:
        return self.px + self.py

    @property
    def x(self) -> slice:
        return slice(0, self.px)

    @property
    def y(self) -> slice:
        return slice(self.px, self.px + self.py)


@dataclass(frozen=True, eq=False)
class SSModel:
    """State-space model with general process/measurement noise.

    x[t+1] = A x[t] + w[t],  z[t] = C x[t] + v[t], with joint noise covariance
    [[Q, S], [S^T, R]].  Input form for the Riccati solver.
    """

    A: np.ndarray
    C: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    S: np.ndarray
    partition: JointPartition | None = None

    def __post_init__(self) -> None:
        A = _as_matrix(self.A, "A")
        C = _as_matrix(self.C, "C")
        Q = _check_symmetric(_as_matrix(self.Q, "Q"), "Q")
        R = _check_symmetric(_as_matrix(self.R, "R"), "R")
        S = _as_matrix(self.S, "S")
        n = A.shape[0]
        p = C.shape[0]
        if A.shape != (n, n):
            raise ValueError("A must be square")
        if C.shape[1] != n:
            raise ValueError("C must have as many columns as A")
        if Q.shape != (n, n) or R.shape != (p, p) or S.shape != (n, p):
            raise ValueError("noise covariance shapes are inconsistent")
        if self.partition is not None and self.partition.p != p:
            raise ValueError("partition does not match the output dimension")
        for f, v in zip(("A", "C", "Q", "R", "S"), (A, C, Q, R, S)):
            object.__setattr__(self, f, v)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def a_s(self) -> np.ndarray:
        """A - S R^{-1} C, the dynamics matrix with measurement noise removed."""
        return self.A - self.S @ np.linalg.solve(self.R, self.C)

    @property
    def q_s(self) -> np.ndarray:
        """Q - S R^{-1} S^T, the reduced process noise covariance."""
        qs = self.Q - self.S @ np.linalg.solve(self.R, self.S.T)
        return 0.5 * (qs + qs.T)


@dataclass(frozen=True, eq=False)
class ISSModel:
    """Innovations state-space model (A, C, K, V).

    x[t+1] = A x[t] + K e[t], z[t] = C x[t] + e[t], cov(e) = V.  The transfer
    function is H(L) = I + C (L^{-1} I - A)^{-1} K with spectrum H V H*.
    """

    A: np.ndarray
    C: np.ndarray
    K: np.ndarray
    V: np.ndarray
    partition: JointPartition | None = None

    def __post_init__(self) -> None:
        A = _as_matrix(self.A, "A")
        C = _as_matrix(self.C, "C")
        K = _as_matrix(self.K, "K")
        V = _check_symmetric(_as_matrix(self.V, "V"), "V")
        n = A.shape[0]
        p = C.shape[0]
        if A.shape != (n, n):
            raise ValueError("A must be square")
        if C.shape[1] != n or K.shape != (n, p) or V.shape != (p, p):
            raise ValueError("model matrix shapes are inconsistent")
        if self.partition is not None and self.partition.p != p:
            raise ValueError("partition does not match the output dimension")
        for f, v in zip(("A", "C", "K", "V"), (A, C, K, V)):
            object.__setattr__(self, f, v)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def is_stationary(self) -> bool:
        return spectral_radius(self.A) < 1.0 - STABILITY_MARGIN

    def require_partition(self) -> JointPartition:
        if self.partition is None:
            raise ValueError("this operation needs a model with a two-block partition")
        return self.partition

    def frequency_response(self, grid: np.ndarray) -> np.ndarray:
        """Transfer function H(e^{-j lambda}) at each grid frequency, shape (N, p, p)."""
        z = np.exp(1j * np.asarray(grid, dtype=float))  # L^{-1} on the unit circle
        eye_n = np.eye(self.n)
        m = z[:, None, None] * eye_n - self.A
        try:
            x = np.linalg.solve(m, np.broadcast_to(self.K, (len(z), self.n, self.p)))
        except np.linalg.LinAlgError as exc:  # unreachable for stable A
            raise RuntimeError("internal error: resolvent singular on the unit circle") from exc
        h = np.einsum("ij,njk->nik", self.C, x)
        h[:, np.arange(self.p), np.arange(self.p)] += 1.0
        return h

    def as_ss(self) -> SSModel:
        """Equivalent general-noise form (A, C, [K V K^T, V, K V])."""
        kv = self.K @ self.V
        return SSModel(self.A, self.C, kv @ self.K.T, self.V, kv, self.partition)


@dataclass(frozen=True, eq=False)
class SpectralCurve:
    """Spectral values sampled on a frequency grid.

    Values are either a stack of Hermitian PSD matrices, shape (N, p, p), or a
    1-D array of nonnegative scalars (used for log-spectral ratio curves).
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values)
        if grid.ndim != 1 or len(grid) != len(values):
            raise ValueError("grid and values must have matching leading length")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if values.ndim == 1:
            values = values.astype(float)
            if values.min(initial=0.0) < -1e-10:
                raise ValueError("scalar curve has a significantly negative value")
        elif values.ndim == 3 and values.shape[1] == values.shape[2]:
            values = values.astype(complex)
            scale = max(1.0, float(np.abs(values).max(initial=0.0)))
            herm_dev = np.abs(values - values.conj().transpose(0, 2, 1)).max(initial=0.0)
            if herm_dev > 1e-12 * scale:
                raise ValueError("matrix curve is not Hermitian within tolerance")
            values = 0.5 * (values + values.conj().transpose(0, 2, 1))
            min_eig = float(np.linalg.eigvalsh(values).min())
            if min_eig < -1e-10 * scale:
                raise ValueError("matrix curve is not positive semi-definite within tolerance")
        else:
            raise ValueError("values must be (N,) scalars or an (N, p, p) matrix stack")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def is_scalar(self) -> bool:
        return self.values.ndim == 1

    def __len__(self) -> int:
        return len(self.grid)


@dataclass(frozen=True, eq=False)
class AutocovarianceSequence:
    """Autocovariances Gamma(0), ..., Gamma(h_max) of a stationary process."""

    gammas: np.ndarray  # (h_max + 1, p, p)

    def __post_init__(self) -> None:
        g = np.asarray(self.gammas, dtype=float)
        if g.ndim != 3 or g.shape[1] != g.shape[2]:
            raise ValueError("gammas must have shape (h_max + 1, p, p)")
        g.setflags(write=False)
        object.__setattr__(self, "gammas", g)

    @property
    def h_max(self) -> int:
        return self.gammas.shape[0] - 1

    def __getitem__(self, h: int) -> np.ndarray:
        """Gamma(h); negative lags resolve through Gamma(-h) = Gamma(h)^T."""
        if h < 0:
            return self.gammas[-h].T
        return self.gammas[h]


class Check(NamedTuple):
    name: str
    passed: bool
    witness: float


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the structural checks on an ISS model."""

    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            status = "ok" if c.passed else "FAIL"
            lines.append(f"{c.name:<28s} {status:<5s} (witness {c.witness:.6g})")
        return "\n".join(lines)


class PbhResult(NamedTuple):
    passed: bool
    witness: complex | None
    margin: float


def _pbh(a: np.ndarray, b: np.ndarray, unstable_only: bool) -> PbhResult:
    """Eigenvector PBH test: fails iff some left eigenvector q of a (for an
    unstable eigenvalue when unstable_only) has q^T b = 0 up to scale."""
    n = a.shape[0]
    m = b.shape[1]
    threshold = PBH_TOL * max(1.0, float(np.linalg.norm(b, 2))) if b.size else 0.0
    eigvals = np.linalg.eigvals(a)
    best = np.inf
    for lam in eigvals:
        if unstable_only and abs(lam) < 1.0 - STABILITY_MARGIN:
            continue
        # Left-eigenvector space of a at lam is the null space of a^T - lam I.
        mat = a.T.astype(complex) - lam * np.eye(n)
        _, sing, vh = np.linalg.svd(mat)
        # Generous null threshold: defective eigenvalues are computed with
        # O(sqrt(eps)) error, so their near-null directions must be kept.
        null_tol = 1e-8 * max(1.0, sing[0])
        null_rows = np.flatnonzero(sing <= null_tol)
        if len(null_rows) == 0:
            null_rows = np.array([n - 1])
        basis = vh[null_rows].conj().T  # orthonormal columns spanning the null space
        k = basis.shape[1]
        if b.size == 0 or k > m:
            margin = 0.0
        else:
            margin = float(np.linalg.svd(b.T @ basis, compute_uv=False).min())
        if margin <= threshold:
            return PbhResult(False, complex(lam), margin)
        best = min(best, margin)
    if not np.isfinite(best):
        best = np.inf  # vacuous pass: no unstable eigenvalue to inspect
    return PbhResult(True, None, best)


def pbh_test(a, b, mode: str = "controllable") -> PbhResult:
    """PBH test of a matrix pair.

    Parameters
    ----------
    a, b : array_like
        System pair. For ``mode="detectable"`` pass b = C^T of the pair (A, C).
    mode : {"controllable", "stabilizable", "detectable"}
        Which property to test. Stabilizability restricts the eigenvector test
        to eigenvalues with modulus >= 1 - 1e-12; detectability is the
        stabilizability test on the transposed pair.

    Returns
    -------
    PbhResult
        ``passed`` flag, the offending eigenvalue as ``witness`` (None when the
        test passes), and the smallest orthogonality margin encountered.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("a must be a square matrix")
    if b.ndim != 2 or b.shape[0] != a.shape[0]:
        raise ValueError("b must have as many rows as a")
    if mode == "controllable":
        return _pbh(a, b, unstable_only=False)
    if mode == "stabilizable":
        return _pbh(a, b, unstable_only=True)
    if mode == "detectable":
        return _pbh(a.T, b, unstable_only=True)
    raise ValueError(f"unknown mode {mode!r}")


def validate_iss(model: ISSModel, require_stationary: bool = True) -> ValidationReport:
    """Structural validity report for an ISS model.

    Checks V positive definite, stability of A - K C (minimum phase),
    detectability of (A, C), controllability of (A, K), and stability of A
    when ``require_stationary``.
    """
    checks: list[Check] = []

    min_eig = float(np.linalg.eigvalsh(model.V).min())
    checks.append(Check("V positive definite", min_eig > 0.0, min_eig))

    rho_err = spectral_radius(model.A - model.K @ model.C)
    checks.append(Check("A - KC stable", rho_err < 1.0 - STABILITY_MARGIN, rho_err))

    det = pbh_test(model.A, model.C.T, "detectable")
    checks.append(Check("(A, C) detectable", det.passed, det.margin))

    ctr = pbh_test(model.A, model.K, "controllable")
    checks.append(Check("(A, K) controllable", ctr.passed, ctr.margin))

    if require_stationary:
        rho_a = spectral_radius(model.A)
        checks.append(Check("A stable", rho_a < 1.0 - STABILITY_MARGIN, rho_a))

    return ValidationReport(tuple(checks))


def require_stationary(model: ISSModel) -> None:
    """Raise unless the state transition matrix is stable."""
    rho = spectral_radius(model.A)
    if rho >= 1.0 - STABILITY_MARGIN:
        raise PreconditionError(f"model is not stationary: spectral radius(A) = {rho:.6g}")


def var_to_iss(
    coefficients,
    sigma,
    partition: JointPartition | None = None,
) -> ISSModel:
    """Convert a stable VAR(r) to its companion-form ISS model.

    Parameters
    ----------
    coefficients : sequence of (p, p) arrays
        Lag coefficient matrices A_1, ..., A_r.
    sigma : (p, p) array
        Positive definite innovation covariance.
    partition : JointPartition, optional
        Output partition to attach to the resulting model.

    Returns
    -------
    ISSModel
        Model with companion state matrix, C = [A_1 ... A_r] and K = [I; 0].

    Raises
    ------
    PreconditionError
        If the companion matrix is unstable or sigma is not positive definite.
    """
    coeffs = [np.asarray(c, dtype=float) for c in coefficients]
    if len(coeffs) < 1:
        raise ValueError("need at least one lag coefficient matrix")
    p = coeffs[0].shape[0]
    for c in coeffs:
        if c.shape != (p, p):
            raise ValueError("all lag coefficients must be square with equal size")
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (p, p):
        raise ValueError("sigma shape does not match the coefficients")
    try:
        np.linalg.cholesky(0.5 * (sigma + sigma.T))
    except np.linalg.LinAlgError as exc:
        raise PreconditionError("sigma must be positive definite") from exc

    r = len(coeffs)
    n = r * p
    companion = np.zeros((n, n))
    companion[:p, :] = np.hstack(coeffs)
    if r > 1:
        companion[p:, : n - p] = np.eye(n - p)
    rho = spectral_radius(companion)
    if rho >= 1.0 - STABILITY_MARGIN:
        raise PreconditionError(f"VAR is unstable: companion spectral radius = {rho:.6g}")

    c = np.hstack(coeffs)
    k = np.zeros((n, p))
    k[:p, :] = np.eye(p)
    return ISSModel(companion, c, k, 0.5 * (sigma + sigma.T), partition)


def spectrum_of_iss(model: ISSModel, grid: np.ndarray | None = None) -> SpectralCurve:
    """Spectral density matrix f(lambda) = H V H* on a frequency grid.

    The model must be stationary. The default grid is the uniform 4096-point
    grid on [-pi, pi).
    """
    require_stationary(model)
    if grid is None:
        grid = default_grid()
    h = model.frequency_response(grid)
    f = np.einsum("nij,jk,nlk->nil", h, model.V, h.conj())
    f = 0.5 * (f + f.conj().transpose(0, 2, 1))
    return SpectralCurve(grid, f)


def solve_lyapunov(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Solve P = A P A^T + W for stable A by the doubling iteration."""
    a = np.asarray(a, dtype=float)
    w = np.asarray(w, dtype=float)
    rho = spectral_radius(a)
    if rho >= 1.0 - STABILITY_MARGIN:
        raise PreconditionError(f"Lyapunov equation needs stable A, spectral radius = {rho:.6g}")
    p = 0.5 * (w + w.T)
    m = a.copy()
    for _ in range(LYAPUNOV_MAX_DOUBLINGS):
        update = m @ p @ m.T
        p = p + 0.5 * (update + update.T)
        if np.linalg.norm(update, "fro") <= LYAPUNOV_TOL * max(1.0, np.linalg.norm(p, "fro")):
            return p
        m = m @ m
    raise ConvergenceError("Lyapunov doubling iteration did not converge")


def autocovariance_of_iss(model: ISSModel, h_max: int) -> AutocovarianceSequence:
    """Autocovariances Gamma(0..h_max) of a stationary ISS model.

    Uses the state covariance Pi from the Lyapunov equation:
    Gamma(0) = C Pi C^T + V and Gamma(h) = C A^{h-1} (A Pi C^T + K V), h >= 1.
    """
    if h_max < 0:
        raise ValueError("h_max must be nonnegative")
    require_stationary(model)
    kv = model.K @ model.V
    pi = solve_lyapunov(model.A, kv @ model.K.T)
    gammas = np.empty((h_max + 1, model.p, model.p))
    g0 = model.C @ pi @ model.C.T + model.V
    gammas[0] = 0.5 * (g0 + g0.T)
    x = model.A @ pi @ model.C.T + kv
    for h in range(1, h_max + 1):
        gammas[h] = model.C @ x
        x = model.A @ x
    return AutocovarianceSequence(gammas)
