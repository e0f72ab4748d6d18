"""Semi-Hilbertian context built from a positive semidefinite weight A.

A context caches everything derived from ``A`` once: its eigendecomposition,
rank, ``A^{1/2}``, the pseudoinverses, and the orthogonal projector ``P`` onto
``R(A)``. Operators are plain square arrays of the same dimension.

In finite dimension the classes B_A and B_{A^{1/2}} coincide: both are the
operators with ``T(N(A)) ⊆ N(A)``. :func:`is_a_bounded` decides that single
criterion.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotAdjointable, NotHermitian, NotPositive, ShapeError, ZeroOperator
from .numerics import (
    DEFAULT_CONFIG,
    HermitianEigen,
    ToleranceConfig,
    as_vector,
    hermitian_eigen,
    hermitian_residual,
    require_square,
)

__all__ = [
    "SemiHilbertContext",
    "ReducedOperator",
    "Verdict",
    "make_context",
    "a_inner",
    "a_vec_seminorm",
    "is_a_bounded",
    "douglas_residual",
    "require_member",
    "sharp_adjoint",
    "reduced_operator",
    "compress",
    "lift",
]


@dataclass(frozen=True)
class Verdict:
    """A boolean decision together with the number it was decided on.

    Unpacks as ``(holds, witness)``; ``details`` carries secondary
    certificates where a predicate records them.
    """

    holds: bool
    witness: float
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "holds", bool(self.holds))
        object.__setattr__(self, "witness", float(self.witness))

    def __iter__(self):
        yield self.holds
        yield self.witness

    def __bool__(self):
        return bool(self.holds)


@dataclass(frozen=True, eq=False)
class SemiHilbertContext:
    dim: int
    A: np.ndarray
    eig: HermitianEigen
    rank: int
    range_basis: np.ndarray  # orthonormal columns spanning R(A)
    null_basis: np.ndarray  # orthonormal columns spanning N(A)
    range_eigenvalues: np.ndarray  # positive eigenvalues matching range_basis
    sqrtA: np.ndarray
    sqrtA_pinv: np.ndarray
    A_pinv: np.ndarray
    P: np.ndarray
    norm_A: float
    cfg: ToleranceConfig = DEFAULT_CONFIG

    def check_operator(self, T, name="T"):
        T = require_square(T, name)
        if T.shape[0] != self.dim:
            raise ShapeError(f"{name} has dimension {T.shape[0]}, context has {self.dim}")
        return T


@dataclass(frozen=True, eq=False)
class ReducedOperator:
    S: np.ndarray
    range_basis: np.ndarray
    S_r: np.ndarray


def make_context(A, cfg=DEFAULT_CONFIG):
    """Validate ``A`` and build its :class:`SemiHilbertContext`.

    Raises :class:`NotHermitian`, :class:`NotPositive` (with ``lam_min``) or
    :class:`ZeroOperator`.
    """
    A = require_square(A, "A")
    defect = hermitian_residual(A)
    if defect > cfg.eig_tol:
        raise NotHermitian(f"A is not Hermitian: ||A - A*||_F / ||A||_F = {defect:.3e}")
    A = 0.5 * (A + A.conj().T)
    dim = A.shape[0]
    w, V = hermitian_eigen(A, cfg)
    lam_max = float(w[-1])
    if not np.any(A):
        raise ZeroOperator("A must be nonzero")
    if float(w[0]) < -cfg.psd_tol * max(lam_max, 0.0) or lam_max <= 0:
        raise NotPositive(f"A is not positive semidefinite: lambda_min = {w[0]:.3e}", lam_min=float(w[0]))
    keep = w > cfg.rank_tol(dim) * lam_max
    Vr, Vn, d = V[:, keep], V[:, ~keep], w[keep]
    root = np.sqrt(d)
    return SemiHilbertContext(
        dim=dim,
        A=A,
        eig=HermitianEigen(w, V),
        rank=int(keep.sum()),
        range_basis=Vr,
        null_basis=Vn,
        range_eigenvalues=d,
        sqrtA=(Vr * root) @ Vr.conj().T,
        sqrtA_pinv=(Vr / root) @ Vr.conj().T,
        A_pinv=(Vr / d) @ Vr.conj().T,
        P=Vr @ Vr.conj().T,
        norm_A=lam_max,
        cfg=cfg,
    )


def a_inner(ctx, x, y):
    """Semi-inner product ``<x|y>_A = <Ax, y>``, linear in ``x``."""
    x = as_vector(x, ctx.dim, "x")
    y = as_vector(y, ctx.dim, "y")
    return complex(np.vdot(y, ctx.A @ x))


def a_vec_seminorm(ctx, x):
    """``||x||_A``, evaluated as ``||A^{1/2} x||`` to avoid cancellation."""
    x = as_vector(x, ctx.dim, "x")
    return float(np.linalg.norm(ctx.sqrtA @ x))


def _membership_threshold(ctx, T):
    return ctx.cfg.residual_tol * (1.0 + ctx.norm_A * np.linalg.norm(T, 2))


def is_a_bounded(ctx, T):
    """Decide ``T(N(A)) ⊆ N(A)`` via ``||A T (I - P)||_F``."""
    T = ctx.check_operator(T)
    Q = np.eye(ctx.dim) - ctx.P
    res = float(np.linalg.norm(ctx.A @ T @ Q))
    return Verdict(res <= _membership_threshold(ctx, T), res)


def douglas_residual(ctx, T):
    """Range criterion ``R(T*A) ⊆ R(A)`` measured as ``||(I - P) T* A||_F``."""
    T = ctx.check_operator(T)
    Q = np.eye(ctx.dim) - ctx.P
    res = float(np.linalg.norm(Q @ T.conj().T @ ctx.A))
    return Verdict(res <= _membership_threshold(ctx, T), res)


def require_member(ctx, T, what="this quantity"):
    T = ctx.check_operator(T)
    ok, res = is_a_bounded(ctx, T)
    if not ok:
        raise NotAdjointable(
            f"T does not leave N(A) invariant (||A T (I-P)||_F = {res:.3e}); {what} is undefined",
            residual=res,
        )
    return T


def sharp_adjoint(ctx, T):
    """Distinguished A-adjoint ``T# = A^+ T* A``."""
    T = require_member(ctx, T, "the A-adjoint")
    return ctx.A_pinv @ T.conj().T @ ctx.A


def compress(ctx, T):
    """Rank x rank matrix of ``A^{1/2} T (A^{1/2})^+`` on ``R(A)``.

    No membership check; callers that need one use :func:`reduced_operator`.
    """
    Vr = ctx.range_basis
    root = np.sqrt(ctx.range_eigenvalues)
    return (root[:, None] * (Vr.conj().T @ T @ Vr)) / root[None, :]


def lift(ctx, S_r):
    """Inverse of :func:`compress` onto operators that vanish on N(A)."""
    Vr = ctx.range_basis
    root = np.sqrt(ctx.range_eigenvalues)
    inner = (S_r / root[:, None]) * root[None, :]
    return Vr @ inner @ Vr.conj().T


def reduced_operator(ctx, T):
    """Finite-dimensional reduced operator of an A-bounded ``T``."""
    T = require_member(ctx, T, "the reduced operator")
    return ReducedOperator(
        S=ctx.sqrtA @ T @ ctx.sqrtA_pinv,
        range_basis=ctx.range_basis,
        S_r=compress(ctx, T),
    )
