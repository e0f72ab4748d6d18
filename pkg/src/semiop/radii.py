"""Radius and seminorm quantities of A-bounded operators.

All of them are evaluated on the reduced compression ``S_r`` (see
:func:`semiop.semispace.compress`): the A-seminorm, A-numerical radius and
A-spectral radius of ``T`` are the classical norm, numerical radius and
spectral radius of ``S_r``.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .numerics import DEFAULT_CONFIG, require_square
from .semispace import compress, is_a_bounded, require_member, sharp_adjoint

__all__ = [
    "INFINITE",
    "Infinite",
    "GelfandTrace",
    "JointRadiusTrace",
    "RadiiBundle",
    "AnalysisReport",
    "a_operator_seminorm",
    "classical_numerical_radius",
    "classical_spectral_radius",
    "a_numerical_radius",
    "gelfand_sequence",
    "a_spectral_radius",
    "kittaneh_bound",
    "joint_gram",
    "a_joint_spectral_radius",
    "a_maximal_numerical_radius",
    "power_seminorms",
    "analyze",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class Infinite:
    """Marker for an infinite A-numerical radius.

    Deliberately not a float: ordering comparisons raise ``TypeError`` so an
    infinite value can never slip silently into an inequality check.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (Infinite, ())


INFINITE = Infinite()


@dataclass
class GelfandTrace:
    estimates: List[Tuple[int, float]]
    converged: bool
    final: float

    @property
    def infimum(self):
        return min(v for _, v in self.estimates)


@dataclass
class JointRadiusTrace:
    estimates: List[Tuple[int, float]]
    converged: bool
    final: float


@dataclass
class RadiiBundle:
    a_norm: float
    a_numerical_radius: object  # float or INFINITE
    a_spectral_radius: float
    omega_max: float
    kittaneh_bound: float


@dataclass
class AnalysisReport:
    dim: int
    rank: int
    member: bool
    membership_residual: float
    a_norm: Optional[float] = None
    a_numerical_radius: object = None
    a_spectral_radius: Optional[float] = None
    omega_max: Optional[float] = None
    kittaneh_bound: Optional[float] = None
    sharp: Optional[np.ndarray] = None
    gelfand: Optional[GelfandTrace] = None
    notes: List[str] = field(default_factory=list)

    @property
    def radii(self):
        if not self.member:
            return None
        return RadiiBundle(
            self.a_norm, self.a_numerical_radius, self.a_spectral_radius, self.omega_max, self.kittaneh_bound
        )


def _norm2(M):
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def _reduced(ctx, T, what):
    T = require_member(ctx, T, what)
    return compress(ctx, T)


def a_operator_seminorm(ctx, T, require_member_=True):
    """``||T||_A`` as the largest singular value of the reduced operator.

    For a non-member ``T`` the restricted supremum over ``R(A)`` is still
    finite in finite dimension; pass ``require_member_=False`` to get it
    instead of :class:`~semiop.errors.NotAdjointable`.
    """
    T = ctx.check_operator(T)
    if require_member_:
        return _norm2(_reduced(ctx, T, "||T||_A"))
    if is_a_bounded(ctx, T).holds:
        return _norm2(compress(ctx, T))
    return _norm2(ctx.sqrtA @ T @ ctx.sqrtA_pinv)


def _hermitian_parts(M):
    H = 0.5 * (M + M.conj().T)
    K = -0.5j * (M - M.conj().T)
    return H, K


def _golden_max(f, lo, hi, tol):
    """Maximize a scalar function on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc
    return d, fd


def _refine_max(F, centers, half_width, tol, points=17):
    """Batched nested-grid maximization around several centers at once.

    ``F`` maps an array of abscissae to values. Each round samples
    ``points`` abscissae per center over ``[c - w, c + w]`` and recenters on
    the best one with ``w`` shrunk to one sample spacing, so the bracket
    shrinks by ``(points - 1) / 2`` per round. Returns the best value seen.
    """
    c = np.asarray(centers, dtype=float)
    w = float(half_width)
    offsets = np.linspace(-1.0, 1.0, points)
    best = -math.inf
    while True:
        x = c[:, None] + w * offsets[None, :]
        v = F(x.reshape(-1)).reshape(x.shape)
        j = np.argmax(v, axis=1)
        rows = np.arange(len(c))
        best = max(best, float(v[rows, j].max()))
        if w <= tol:
            return best
        c = x[rows, j]
        w *= 2.0 / (points - 1)


def _grid_candidates(values, slack, limit):
    """Indices of circular local maxima within ``slack`` of the global max."""
    top = values.max()
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    idx = np.nonzero((values >= left) & (values >= right) & (values >= top - slack))[0]
    if idx.size > limit:
        idx = idx[np.argsort(values[idx])[::-1][:limit]]
    return idx


def classical_numerical_radius(M, cfg=DEFAULT_CONFIG):
    """``max_theta lambda_max(Re(e^{i theta} M))``.

    A uniform grid of ``cfg.theta_grid`` angles is scanned first. Since the
    objective is ``||M||``-Lipschitz in theta, only grid cells whose value
    lies within ``||M|| * h / 2`` of the best one can hold the maximum; all
    such cells are refined together by nested sub-grids down to a bracket
    of ``1e-10``.
    """
    M = require_square(M, "M")
    n = M.shape[0]
    if n == 1:
        return float(abs(M[0, 0]))
    norm = _norm2(M)
    if norm == 0:
        return 0.0
    H, K = _hermitian_parts(M)
    N = cfg.theta_grid
    h = 2.0 * math.pi / N
    if N % 2 == 0:
        # lambda_max at theta + pi equals -lambda_min at theta
        theta = h * np.arange(N // 2)
        w = np.linalg.eigvalsh(np.cos(theta)[:, None, None] * H - np.sin(theta)[:, None, None] * K)
        values = np.concatenate([w[:, -1], -w[:, 0]])
    else:
        theta = h * np.arange(N)
        w = np.linalg.eigvalsh(np.cos(theta)[:, None, None] * H - np.sin(theta)[:, None, None] * K)
        values = w[:, -1]

    def F(t):
        return np.linalg.eigvalsh(np.cos(t)[:, None, None] * H - np.sin(t)[:, None, None] * K)[:, -1]

    best = float(values.max())
    idx = _grid_candidates(values, 0.5 * norm * h, limit=16)
    return max(best, _refine_max(F, h * idx, h, tol=1e-10))


def classical_spectral_radius(M, cfg=DEFAULT_CONFIG, trace=False):
    """Spectral radius by rescaled repeated squaring.

    Keeps ``C_k = M^(2^k) / ||M^(2^k)||`` and ``l_k = log ||M^(2^k)||``; the
    estimate ``l_k / 2^k`` decreases to ``log r(M)``. Iteration stops when
    consecutive estimates differ by at most ``conv_tol * max(1, |g|)`` or
    after ``max_squarings`` squarings.
    """
    M = require_square(M, "M")
    s0 = _norm2(M)
    history = []
    if s0 == 0:
        return (0.0, [(1, 0.0)], True) if trace else 0.0
    C = M / s0
    ell = math.log(s0)
    g = ell
    history.append((1, math.exp(g)))
    converged = False
    for k in range(1, cfg.max_squarings + 1):
        Q = C @ C
        s = _norm2(Q)
        if s == 0:
            history.append((2**k, 0.0))
            return (0.0, history, True) if trace else 0.0
        C = Q / s
        ell = 2.0 * ell + math.log(s)
        g_new = ell / 2.0**k
        history.append((2**k, math.exp(g_new)))
        if abs(g_new - g) <= cfg.conv_tol * max(1.0, abs(g)):
            g = g_new
            converged = True
            break
        g = g_new
    r = math.exp(g)
    return (r, history, converged) if trace else r


def a_numerical_radius(ctx, T):
    """``omega_A(T)``, or :data:`INFINITE` when ``T(N(A))`` escapes ``N(A)``."""
    T = ctx.check_operator(T)
    if not is_a_bounded(ctx, T).holds:
        return INFINITE
    return classical_numerical_radius(compress(ctx, T), ctx.cfg)


def gelfand_sequence(ctx, T, n_max):
    """``||T^n||_A^(1/n)`` for ``n = 1..n_max``, accumulated in log space."""
    S = _reduced(ctx, T, "the Gelfand sequence")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    estimates = []
    s = _norm2(S)
    if s == 0:
        estimates = [(n, 0.0) for n in range(1, n_max + 1)]
        return GelfandTrace(estimates, True, 0.0)
    Pn = S / s
    log_norm = math.log(s)
    estimates.append((1, s))
    dead = False
    for n in range(2, n_max + 1):
        if dead:
            estimates.append((n, 0.0))
            continue
        Q = Pn @ S
        q = _norm2(Q)
        if q == 0:
            dead = True
            estimates.append((n, 0.0))
            continue
        log_norm += math.log(q)
        Pn = Q / q
        estimates.append((n, math.exp(log_norm / n)))
    final = estimates[-1][1]
    prev = estimates[-2][1] if len(estimates) > 1 else final
    converged = abs(final - prev) <= ctx.cfg.conv_tol * max(1.0, final)
    return GelfandTrace(estimates, converged, final)


def a_spectral_radius(ctx, T):
    """``r_A(T) = lim ||T^n||_A^(1/n)``."""
    return classical_spectral_radius(_reduced(ctx, T, "r_A(T)"), ctx.cfg)


def kittaneh_bound(ctx, T):
    """``(||T||_A + ||T^2||_A^(1/2)) / 2``, an upper bound for ``omega_A(T)``."""
    S = _reduced(ctx, T, "the Kittaneh bound")
    return 0.5 * (_norm2(S) + math.sqrt(_norm2(S @ S)))


def power_seminorms(ctx, T, n_max):
    """``[||T^1||_A, ..., ||T^n_max||_A]`` from plain powers of ``S_r``."""
    S = _reduced(ctx, T, "power seminorms")
    out = []
    P = np.eye(S.shape[0], dtype=complex)
    for _ in range(n_max):
        P = P @ S
        out.append(_norm2(P))
    return out


def joint_gram(ctx, operators, n):
    """``sum_{|g| = n} T_g# T_g`` in full space via ``M_{k+1} = sum_i T_i# M_k T_i``."""
    ops = [require_member(ctx, T, "the joint spectral radius") for T in operators]
    sharps = [sharp_adjoint(ctx, T) for T in ops]
    M = sum(Ts @ T for Ts, T in zip(sharps, ops))
    for _ in range(n - 1):
        M = sum(Ts @ M @ T for Ts, T in zip(sharps, ops))
    return M


_SUPEROP_MAX_RANK = 40


def _superop_step(Lhat, ell):
    """Square a normalized superoperator, returning ``(Lhat^2 / s, 2 ell + log s)``."""
    Q = Lhat @ Lhat
    s = _norm2(Q)
    if s == 0:
        return None, -math.inf
    return Q / s, 2.0 * ell + math.log(s)


def a_joint_spectral_radius(ctx, operators, n_max=None):
    """A-joint spectral radius of a tuple of A-bounded operators.

    Works on the reduced operators ``S_i``, where the A-adjoint becomes the
    ordinary adjoint, so ``M_n`` reduces to ``L^n(I)`` for the superoperator
    ``L(X) = sum_i S_i^* X S_i``. Word lengths follow the doubling schedule
    ``n = 1, 2, 4, ...`` up to ``n_max`` (default ``2**jsr_depth``) by
    squaring ``L`` with log rescaling; ``n_max`` itself is appended when it
    is not a power of two. Estimates are ``||M_n||_A^(1/(2n))``.
    """
    cfg = ctx.cfg
    if len(operators) < 1:
        raise ValueError("the tuple must contain at least one operator")
    reduced = [_reduced(ctx, T, "the joint spectral radius") for T in operators]
    if n_max is None:
        n_max = 2**cfg.jsr_depth
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    r = reduced[0].shape[0]
    if r > _SUPEROP_MAX_RANK:
        return _jsr_linear(reduced, n_max, cfg)

    # row-major vec: vec(B X C) = (B kron C^T) vec(X)
    L = sum(np.kron(S.conj().T, S.T) for S in reduced)
    vec_id = np.eye(r, dtype=complex).reshape(-1)

    def estimate(Lhat, ell, n):
        if Lhat is None:
            return 0.0
        Mn = (Lhat @ vec_id).reshape(r, r)
        m = _norm2(Mn)
        if m == 0:
            return 0.0
        return math.exp((ell + math.log(m)) / (2.0 * n))

    s = _norm2(L)
    if s == 0:
        return JointRadiusTrace([(1, 0.0)], True, 0.0)
    Lhat, ell = L / s, math.log(s)
    n = 1
    estimates = [(1, estimate(Lhat, ell, 1))]
    converged = False
    powers = [(1, Lhat, ell)]
    while 2 * n <= n_max:
        Lhat, ell = _superop_step(Lhat, ell)
        n *= 2
        e = estimate(Lhat, ell, n)
        prev = estimates[-1][1]
        estimates.append((n, e))
        if Lhat is None or e == 0.0:
            converged = True
            break
        powers.append((n, Lhat, ell))
        if prev > 0 and abs(math.log(e) - math.log(prev)) <= cfg.conv_tol * max(1.0, abs(math.log(prev))):
            converged = True
            break
    if not converged and n != n_max:
        # binary assembly of L^n_max from the stored squarings
        acc, acc_ell, remaining = None, 0.0, n_max
        for m, Lp, lp in reversed(powers):
            while remaining >= m:
                if acc is None:
                    acc, acc_ell = Lp, lp
                else:
                    Q = Lp @ acc
                    q = _norm2(Q)
                    if q == 0:
                        acc = None
                        remaining = 0
                        break
                    acc, acc_ell = Q / q, acc_ell + lp + math.log(q)
                remaining -= m
        estimates.append((n_max, estimate(acc, acc_ell, n_max) if acc is not None else 0.0))
    return JointRadiusTrace(estimates, converged, estimates[-1][1])


def _jsr_linear(reduced, n_max, cfg):
    """Fallback for large ranks: linear recursion with doubling checkpoints."""
    n_max = min(n_max, 4096)
    M = sum(S.conj().T @ S for S in reduced)
    ell = 0.0
    estimates = []
    checkpoint = 1
    for n in range(1, n_max + 1):
        if n > 1:
            M = sum(S.conj().T @ M @ S for S in reduced)
        m = _norm2(M)
        if m == 0:
            estimates.append((n, 0.0))
            return JointRadiusTrace(estimates, True, 0.0)
        ell += math.log(m)
        M = M / m
        if n == checkpoint or n == n_max:
            estimates.append((n, math.exp(ell / (2.0 * n))))
            checkpoint *= 2
    return JointRadiusTrace(estimates, False, estimates[-1][1])


def a_maximal_numerical_radius(ctx, T):
    """``omega_max^A(T)`` via the compression to the top singular subspace.

    The maximal numerical range of ``S_r`` is the numerical range of its
    compression to the right singular vectors whose singular values lie
    within ``cluster_tol`` (relative) of the largest one.
    """
    S = _reduced(ctx, T, "omega_max^A(T)")
    U, sig, Vh = np.linalg.svd(S)
    if sig[0] == 0:
        return 0.0
    keep = sig >= sig[0] * (1.0 - ctx.cfg.cluster_tol)
    V = Vh.conj().T[:, keep]
    return classical_numerical_radius(V.conj().T @ S @ V, ctx.cfg)


def analyze(ctx, T, trace_n=0):
    """Collect every radius quantity of ``T`` into an :class:`AnalysisReport`."""
    T = ctx.check_operator(T)
    ok, res = is_a_bounded(ctx, T)
    report = AnalysisReport(dim=ctx.dim, rank=ctx.rank, member=bool(ok), membership_residual=res)
    if not ok:
        report.a_numerical_radius = INFINITE
        report.a_norm = a_operator_seminorm(ctx, T, require_member_=False)
        report.notes.append("T does not leave N(A) invariant; W_A(T) = C")
        return report
    report.a_norm = a_operator_seminorm(ctx, T)
    report.a_numerical_radius = a_numerical_radius(ctx, T)
    report.a_spectral_radius = a_spectral_radius(ctx, T)
    report.omega_max = a_maximal_numerical_radius(ctx, T)
    report.kittaneh_bound = kittaneh_bound(ctx, T)
    report.sharp = sharp_adjoint(ctx, T)
    if trace_n:
        report.gelfand = gelfand_sequence(ctx, T, trace_n)
    return report
