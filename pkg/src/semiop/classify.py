"""Operator-class predicates relative to a positive weight A.

Every predicate returns a :class:`~semiop.semispace.Verdict`. Boundary cases
(equality within tolerance) resolve to ``True``; the signed witness is always
reported so callers can apply a stricter policy.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .errors import ChainViolation
from .radii import (
    _golden_max,
    _norm2,
    a_maximal_numerical_radius,
    classical_numerical_radius,
    classical_spectral_radius,
)
from .semispace import Verdict, compress, is_a_bounded, require_member, sharp_adjoint

__all__ = [
    "ClassificationResult",
    "is_a_selfadjoint",
    "is_a_positive",
    "is_a_normal",
    "is_a_hyponormal",
    "hyponormal_dual_check",
    "paranormal_lambda_min",
    "paranormal_sphere_search",
    "is_a_paranormal",
    "is_a_normaloid",
    "is_a_spectraloid",
    "classify_full",
    "PREDICATES",
]

# Certificates that must vanish together may disagree by at most this much
# (relative) before the disagreement counts as a hard failure.
_AGREEMENT_BAND = 1e-5


def _hermitian_defect(M):
    return float(np.linalg.norm(M - M.conj().T))


def is_a_selfadjoint(ctx, T):
    """``AT`` Hermitian within ``residual_tol * (1 + ||AT||_F)``."""
    T = ctx.check_operator(T)
    AT = ctx.A @ T
    res = _hermitian_defect(AT)
    return Verdict(res <= ctx.cfg.residual_tol * (1.0 + np.linalg.norm(AT)), res)


def is_a_positive(ctx, T):
    """``AT >= 0``; the witness is ``lambda_min`` of the Hermitian part of ``AT``."""
    T = ctx.check_operator(T)
    AT = ctx.A @ T
    herm = _hermitian_defect(AT) <= ctx.cfg.residual_tol * (1.0 + np.linalg.norm(AT))
    w = np.linalg.eigvalsh(0.5 * (AT + AT.conj().T))
    lam_min = float(w[0])
    ok = herm and lam_min >= -ctx.cfg.psd_tol * max(1.0, float(w[-1]))
    return Verdict(ok, lam_min)


def is_a_normal(ctx, T):
    """``[T#, T] = 0`` as a matrix, not merely ``A [T#, T] = 0``."""
    T = require_member(ctx, T, "A-normality")
    Ts = sharp_adjoint(ctx, T)
    res = float(np.linalg.norm(Ts @ T - T @ Ts))
    return Verdict(res <= ctx.cfg.residual_tol * (1.0 + np.linalg.norm(T) ** 2), res)


def _psd_verdict(D, scale, tol):
    D = 0.5 * (D + D.conj().T)
    lam_min = float(np.linalg.eigvalsh(D)[0])
    return Verdict(lam_min >= -tol * max(1.0, scale), lam_min)


def is_a_hyponormal(ctx, T):
    """``||Tx||_A >= ||T# x||_A`` for all x.

    Decided on the Hermitian form ``T* A T - (T#)* A T#``.
    """
    T = require_member(ctx, T, "A-hyponormality")
    Ts = sharp_adjoint(ctx, T)
    TAT = T.conj().T @ ctx.A @ T
    D = TAT - Ts.conj().T @ ctx.A @ Ts
    return _psd_verdict(D, _norm2(TAT), ctx.cfg.psd_tol)


def hyponormal_dual_check(ctx, T):
    """The commutator form ``A (T# T - T T#) >= 0`` of A-hyponormality."""
    T = require_member(ctx, T, "A-hyponormality")
    Ts = sharp_adjoint(ctx, T)
    TAT = T.conj().T @ ctx.A @ T
    E = ctx.A @ (Ts @ T - T @ Ts)
    return _psd_verdict(E, _norm2(TAT), ctx.cfg.psd_tol)


def paranormal_lambda_min(S, cfg):
    """``min_lambda lambda_min(C - 2 lambda B + lambda^2 I)`` with ``B = S*S``, ``C = (S^2)* S^2``.

    The minimum is non-negative exactly when ``||Sx||^2 <= ||S^2 x||`` on the
    unit sphere. It is located on a ``lambda_grid`` over ``[0, ||B||]`` and
    refined by golden-section search around every promising grid minimum.
    Returns ``(value, argmin_lambda)``.
    """
    n = S.shape[0]
    B = S.conj().T @ S
    S2 = S @ S
    C = S2.conj().T @ S2
    top = float(np.linalg.eigvalsh(B)[-1])
    if top == 0:
        return 0.0, 0.0
    lam = np.linspace(0.0, top, cfg.lambda_grid)
    # eigenvalues of C - 2 lam B shift by lam^2
    g = np.linalg.eigvalsh(C[None, :, :] - 2.0 * lam[:, None, None] * B[None, :, :])[:, 0] + lam**2

    def neg_g(x):
        return -(float(np.linalg.eigvalsh(C - 2.0 * x * B)[0]) + x * x)

    h = lam[1] - lam[0]
    best_i = int(np.argmin(g))
    best, best_lam = float(g[best_i]), float(lam[best_i])
    # g is a minimum of parabolas with curvature 2, so a cell can undercut its
    # grid value by at most (h/2)^2
    slack = 0.25 * h * h
    padded = np.concatenate([[np.inf], g, [np.inf]])
    local = np.nonzero((g <= padded[:-2]) & (g <= padded[2:]) & (g <= best + slack))[0]
    if local.size > 16:
        local = local[np.argsort(g[local])[:16]]
    for i in local:
        x, v = _golden_max(neg_g, max(0.0, lam[i] - h), min(top, lam[i] + h), tol=1e-12 * max(1.0, top))
        if -v < best:
            best, best_lam = -v, x
    return best, best_lam


def paranormal_sphere_search(S, restarts=32, seed=0, iters=400):
    """Independent estimate of ``min ||S^2 y||^2 - ||S y||^4`` over unit ``y``.

    Projected gradient descent with backtracking on the complex unit sphere,
    restarted from ``restarts`` seeded random points.
    """
    n = S.shape[0]
    B = S.conj().T @ S
    S2 = S @ S
    C = S2.conj().T @ S2
    rng = np.random.default_rng(seed)

    def h(y):
        b = np.vdot(y, B @ y).real
        return np.vdot(y, C @ y).real - b * b

    best = math.inf
    scale = max(1.0, _norm2(S) ** 4)
    for _ in range(restarts):
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y /= np.linalg.norm(y)
        val = h(y)
        step = 1.0 / scale
        for _ in range(iters):
            b = np.vdot(y, B @ y).real
            grad = 2.0 * (C @ y) - 4.0 * b * (B @ y)
            grad -= np.vdot(y, grad).real * y
            gnorm = np.linalg.norm(grad)
            if gnorm <= 1e-15 * scale:
                break
            while True:
                z = y - step * grad
                z /= np.linalg.norm(z)
                new = h(z)
                if new <= val - 1e-4 * step * gnorm**2 or step < 1e-18:
                    break
                step *= 0.5
            if new >= val:
                break
            y, val = z, new
            step *= 2.0
        best = min(best, val)
    return best


def is_a_paranormal(ctx, T, cross_check=False, seed=0):
    """``||Tx||_A^2 <= ||T^2 x||_A`` on the A-unit sphere, decided on ``S_r``.

    With ``cross_check=True`` the sphere search runs too; its verdict lands
    in ``details["sphere_verdict"]``.
    """
    T = require_member(ctx, T, "A-paranormality")
    S = compress(ctx, T)
    scale = max(1.0, _norm2(S) ** 4)
    tol = ctx.cfg.psd_tol * scale
    value, lam = paranormal_lambda_min(S, ctx.cfg)
    details = {"argmin_lambda": lam}
    if cross_check:
        sphere = paranormal_sphere_search(S, seed=seed)
        details["sphere_min"] = sphere
        details["sphere_verdict"] = sphere >= -tol
    return Verdict(value >= -tol, value, details)


def _radii(ctx, S):
    return _norm2(S), classical_numerical_radius(S, ctx.cfg), classical_spectral_radius(S, ctx.cfg)


def is_a_normaloid(ctx, T):
    """``r_A(T) = ||T||_A``; the witness is the signed gap ``r_A - ||T||_A``.

    Secondary certificates: ``omega_A - ||T||_A`` and ``||T^n||_A - ||T||_A^n``
    for n = 2, 3. A normaloid verdict with a non-vanishing certificate, or a
    vanishing ``omega`` gap next to a clearly non-zero ``r`` gap, raises
    :class:`~semiop.errors.ChainViolation`. A vanishing power gap alone
    decides nothing: finitely many powers do not characterize the class.
    """
    T = require_member(ctx, T, "A-normaloidity")
    S = compress(ctx, T)
    norm, omega, r = _radii(ctx, S)
    scale = max(1.0, norm)
    tol = ctx.cfg.conv_tol * scale
    gap = r - norm
    S2 = S @ S
    power_gaps = {2: _norm2(S2) - norm**2, 3: _norm2(S2 @ S) - norm**3}
    details = {"omega_gap": omega - norm, "power_gaps": power_gaps, "r": r, "omega": omega, "norm": norm}
    holds = abs(gap) <= tol
    band = _AGREEMENT_BAND * scale
    if holds and (abs(omega - norm) > band or any(abs(v) > band * scale ** (n - 1) for n, v in power_gaps.items())):
        raise ChainViolation(f"normaloid by r_A but certificates disagree: {details}")
    if not holds and abs(omega - norm) <= tol and abs(gap) > band:
        raise ChainViolation(f"omega_A = ||T||_A but r_A is far from ||T||_A: {details}")
    return Verdict(holds, gap, details)


def is_a_spectraloid(ctx, T):
    """``r_A(T) = omega_A(T)``; the witness is ``r_A - omega_A``.

    Secondary certificate ``omega_A(T^n) - omega_A(T)^n`` for n = 2, 3 must
    vanish whenever the verdict is true.
    """
    T = require_member(ctx, T, "A-spectraloidity")
    S = compress(ctx, T)
    omega = classical_numerical_radius(S, ctx.cfg)
    r = classical_spectral_radius(S, ctx.cfg)
    scale = max(1.0, omega)
    gap = r - omega
    holds = abs(gap) <= ctx.cfg.conv_tol * scale
    S2 = S @ S
    power_gaps = {
        2: classical_numerical_radius(S2, ctx.cfg) - omega**2,
        3: classical_numerical_radius(S2 @ S, ctx.cfg) - omega**3,
    }
    details = {"power_gaps": power_gaps, "r": r, "omega": omega}
    if holds and any(abs(v) > _AGREEMENT_BAND * scale**n for n, v in power_gaps.items()):
        raise ChainViolation(f"spectraloid but omega_A(T^n) != omega_A(T)^n: {details}")
    return Verdict(holds, gap, details)


PREDICATES = {
    "a_selfadjoint": is_a_selfadjoint,
    "a_positive": is_a_positive,
    "a_normal": is_a_normal,
    "a_hyponormal": is_a_hyponormal,
    "a_paranormal": is_a_paranormal,
    "a_normaloid": is_a_normaloid,
    "a_spectraloid": is_a_spectraloid,
}

# (stronger, weaker): stronger ⟹ weaker on members
CHAIN = [
    ("a_normal", "a_hyponormal"),
    ("a_hyponormal", "a_paranormal"),
    ("a_paranormal", "a_normaloid"),
    ("a_normaloid", "a_spectraloid"),
    ("a_selfadjoint", "a_paranormal"),
]


@dataclass
class ClassificationResult:
    member: bool
    a_selfadjoint: Optional[bool] = None
    a_positive: Optional[bool] = None
    a_normal: Optional[bool] = None
    a_hyponormal: Optional[bool] = None
    a_paranormal: Optional[bool] = None
    a_normaloid: Optional[bool] = None
    a_spectraloid: Optional[bool] = None
    omega_infinite: bool = False
    witnesses: Dict[str, float] = field(default_factory=dict)

    def as_dict(self):
        return {name: getattr(self, name) for name in ["member", *PREDICATES, "omega_infinite"]}


def classify_full(ctx, T):
    """Run every predicate and check the implication chain.

    On non-members only A-selfadjointness and A-positivity are evaluated;
    the rest stay ``None`` (not applicable) and ``omega_infinite`` is set.
    """
    T = ctx.check_operator(T)
    ok, res = is_a_bounded(ctx, T)
    result = ClassificationResult(member=bool(ok))
    result.witnesses["membership_residual"] = res
    for name in ("a_selfadjoint", "a_positive"):
        v = PREDICATES[name](ctx, T)
        setattr(result, name, bool(v.holds))
        result.witnesses[name] = v.witness
    if not ok:
        result.omega_infinite = True
        return result
    for name in ("a_normal", "a_hyponormal", "a_paranormal", "a_normaloid", "a_spectraloid"):
        v = PREDICATES[name](ctx, T)
        setattr(result, name, bool(v.holds))
        result.witnesses[name] = v.witness
    for strong, weak in CHAIN:
        if getattr(result, strong) and not getattr(result, weak):
            raise ChainViolation(
                f"{strong} holds but {weak} fails (witnesses {result.witnesses[strong]:.3e}, "
                f"{result.witnesses[weak]:.3e})"
            )
    return result
