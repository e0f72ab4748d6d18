"""Dense complex linear-algebra kernel.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
The Hermitian eigensolver ships two routes: LAPACK (``numpy.linalg.eigh``,
the default) and a cyclic complex Jacobi iteration kept as a self-contained
reference implementation.
"""

from dataclasses import dataclass, fields, replace
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConvergenceError, NotFiniteError, NotPositive, ShapeError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_CONFIG",
    "HermitianEigen",
    "SVDResult",
    "as_matrix",
    "as_vector",
    "require_square",
    "hermitian_residual",
    "hermitian_eigen",
    "jacobi_eigen",
    "svd",
    "pinv",
    "psd_sqrt",
    "is_psd",
    "operator_norm",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerance policy shared by every computation.

    ``rank_rel_tol=None`` means ``1e-12 * dim`` for the matrix at hand.
    ``residual_tol`` scales the exact-zero tests (membership, A-selfadjoint,
    A-normal) and ``cluster_tol`` fixes the width of the top singular
    cluster used for the maximal numerical radius.
    """

    rank_rel_tol: Optional[float] = None
    psd_tol: float = 1e-10
    conv_tol: float = 1e-10
    eig_tol: float = 1e-13
    residual_tol: float = 1e-10
    cluster_tol: float = 1e-8
    theta_grid: int = 720
    lambda_grid: int = 512
    max_squarings: int = 50
    jsr_depth: int = 20

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name in _COUNT_FIELDS:
                if isinstance(value, bool) or int(value) != value or value < 2:
                    raise ValueError(f"{f.name} must be an integer >= 2, got {value!r}")
            elif not (value > 0 and np.isfinite(value)):
                raise ValueError(f"{f.name} must be a positive finite number, got {value!r}")

    def rank_tol(self, dim):
        if self.rank_rel_tol is not None:
            return self.rank_rel_tol
        return 1e-12 * dim

    def with_overrides(self, **overrides):
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **clean)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


_COUNT_FIELDS = {"theta_grid", "lambda_grid", "max_squarings", "jsr_depth"}

DEFAULT_CONFIG = ToleranceConfig()


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns


class SVDResult(NamedTuple):
    sigma: np.ndarray  # descending
    U: np.ndarray
    V: np.ndarray  # M = U @ diag(sigma) @ V^*


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D complex128 array."""
    arr = np.array(M, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NotFiniteError(f"{name} contains NaN or Inf entries")
    return arr


def as_vector(x, dim, name="vector"):
    arr = np.asarray(x, dtype=np.complex128).reshape(-1)
    if arr.shape[0] != dim:
        raise ShapeError(f"{name} has length {arr.shape[0]}, expected {dim}")
    return arr


def require_square(M, name="matrix"):
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {M.shape}")
    return M


def hermitian_residual(H):
    """Relative Hermitian defect ``||H - H*||_F / ||H||_F`` (0 for H = 0)."""
    scale = np.linalg.norm(H)
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(H - H.conj().T) / scale)


def hermitian_eigen(H, cfg=DEFAULT_CONFIG, method="lapack"):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``H`` is symmetrized as ``(H + H^*)/2`` first, so a defect below
    ``eig_tol`` is silently absorbed. ``method="jacobi"`` runs the cyclic
    complex Jacobi solver instead of LAPACK.
    """
    H = require_square(H, "H")
    Hs = 0.5 * (H + H.conj().T)
    if method == "lapack":
        w, V = np.linalg.eigh(Hs)
        return HermitianEigen(w, V)
    if method == "jacobi":
        return jacobi_eigen(Hs)
    raise ValueError(f"unknown eigensolver method {method!r}")


def jacobi_eigen(H, max_sweeps=100, rel_tol=1e-14):
    """Cyclic Jacobi with complex rotations on a Hermitian matrix.

    Each (p, q) rotation first removes the phase of ``H[p, q]`` and then
    applies the real symmetric Jacobi rotation to the 2x2 block.
    """
    a = np.array(H, dtype=np.complex128)
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    if scale == 0 or n == 1:
        return HermitianEigen(np.real(np.diag(a)).copy(), v)

    def off(m):
        return np.linalg.norm(m - np.diag(np.diag(m)))

    for _ in range(max_sweeps):
        if off(a) < rel_tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b < 1e-300:
                    continue
                phase = apq / b
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * np.arctan2(2.0 * b, app - aqq)
                c, s = np.cos(theta), np.sin(theta)
                # columns p, q of D @ R with D = diag(1, conj(phase))
                u = np.array([[c, -s], [s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ u
    else:
        res = off(a)
        if res >= rel_tol * scale:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal mass {res:.3e})",
                residual=res,
            )
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return HermitianEigen(w[order], v[:, order])


def svd(M, cfg=DEFAULT_CONFIG):
    """Thin SVD with singular values in descending order."""
    M = as_matrix(M)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    return SVDResult(s, U, Vh.conj().T)


def pinv(M, cfg=DEFAULT_CONFIG):
    """Moore-Penrose pseudoinverse with a relative rank cutoff.

    Singular values at or below ``rank_tol(max(m, n)) * sigma_max`` count as
    zero.
    """
    M = as_matrix(M)
    s, U, V = svd(M, cfg)
    if s.size == 0 or s[0] == 0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=np.complex128)
    keep = s > cfg.rank_tol(max(M.shape)) * s[0]
    return (V[:, keep] / s[keep]) @ U[:, keep].conj().T


def psd_sqrt(A, cfg=DEFAULT_CONFIG):
    """Hermitian PSD square root.

    Eigenvalues in ``[-psd_tol * lam_max, 0)`` are clamped to zero; anything
    more negative raises :class:`NotPositive`.
    """
    w, V = hermitian_eigen(A, cfg)
    lam_max = max(w[-1], 0.0)
    if w[0] < -cfg.psd_tol * lam_max or (lam_max == 0 and w[0] < 0):
        raise NotPositive(f"matrix has eigenvalue {w[0]:.3e} < 0", lam_min=float(w[0]))
    r = np.sqrt(np.clip(w, 0.0, None))
    return (V * r) @ V.conj().T


def is_psd(H, cfg=DEFAULT_CONFIG):
    """Return ``(ok, lam_min)``.

    ``ok`` holds when H is Hermitian within ``eig_tol`` and
    ``lam_min >= -psd_tol * max(1, lam_max)``.
    """
    H = require_square(H, "H")
    w = np.linalg.eigvalsh(0.5 * (H + H.conj().T))
    lam_min = float(w[0])
    if hermitian_residual(H) > cfg.eig_tol:
        return False, lam_min
    return lam_min >= -cfg.psd_tol * max(1.0, float(w[-1])), lam_min


def operator_norm(M, cfg=DEFAULT_CONFIG):
    """Spectral norm (largest singular value)."""
    M = as_matrix(M)
    return float(np.linalg.svd(M, compute_uv=False)[0])
