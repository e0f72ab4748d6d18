"""Inequality checker, random ensembles, worked examples and truncated demos.

Checks are recorded as ``lhs <= rhs`` (or ``lhs == rhs``) with a slack that
is normalized by ``max(1, |lhs|, |rhs|)``. A check passes when its
normalized slack is at least ``-tol``.
"""

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .classify import (
    classify_full,
    hyponormal_dual_check,
    is_a_hyponormal,
    is_a_normaloid,
)
from .errors import ChainViolation, SemiopError
from .numerics import DEFAULT_CONFIG
from .radii import (
    INFINITE,
    _norm2,
    a_operator_seminorm,
    classical_numerical_radius,
    classical_spectral_radius,
    a_maximal_numerical_radius,
)
from .semispace import compress, douglas_residual, is_a_bounded, lift, make_context

__all__ = [
    "CheckRecord",
    "VerificationReport",
    "EnsembleSpec",
    "FAMILIES",
    "random_weight",
    "random_member",
    "sample_family",
    "verify_instance",
    "verify_ensemble",
    "DemoPair",
    "demo_ex01",
    "demo_shift_z",
    "RegistryEntry",
    "paper_registry",
    "DEMOS",
]

INEQ_TOL = 1e-8
EQ_TOL = 1e-7
POWER_EQ_TOL = 1e-6


@dataclass
class CheckRecord:
    name: str
    ref: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    tol: float

    def as_dict(self):
        return {
            "name": self.name,
            "ref": self.ref,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "passed": self.passed,
            "tol": self.tol,
        }


def _scale(*values):
    return max([1.0] + [abs(v) for v in values])


def _leq(name, ref, lhs, rhs, tol=INEQ_TOL):
    lhs, rhs = float(lhs), float(rhs)
    slack = (rhs - lhs) / _scale(lhs, rhs)
    return CheckRecord(name, ref, lhs, rhs, slack, slack >= -tol, tol)


def _eq(name, ref, lhs, rhs, tol=EQ_TOL):
    lhs, rhs = float(lhs), float(rhs)
    slack = -abs(lhs - rhs) / _scale(lhs, rhs)
    return CheckRecord(name, ref, lhs, rhs, slack, slack >= -tol, tol)


def _agree(name, ref, a, b, wa=0.0, wb=0.0):
    """Two boolean verdicts must coincide; witnesses go in lhs/rhs."""
    ok = bool(a) == bool(b)
    return CheckRecord(name, ref, float(wa), float(wb), 0.0 if ok else -1.0, ok, 0.0)


@dataclass
class VerificationReport:
    instance_id: str
    checks: List[CheckRecord] = field(default_factory=list)
    samples: int = 1
    failures: int = 0
    worst_slack: float = math.inf
    failed_instances: List[Dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self):
        return self.failures == 0 and all(c.passed for c in self.checks)

    def add(self, record):
        self.checks.append(record)
        self.worst_slack = min(self.worst_slack, record.slack)

    def failed_checks(self):
        return [c for c in self.checks if not c.passed]

    def as_dict(self):
        return {
            "instance_id": self.instance_id,
            "samples": self.samples,
            "failures": self.failures,
            "worst_slack": None if math.isinf(self.worst_slack) else self.worst_slack,
            "checks": [c.as_dict() for c in self.checks],
            "failed_instances": self.failed_instances,
            "notes": list(self.notes),
        }

    def digest(self):
        """sha256 of the canonical JSON form; equal reports give equal digests."""
        payload = json.dumps(self.as_dict(), sort_keys=True, default=repr)
        return hashlib.sha256(payload.encode()).hexdigest()


FAMILIES = ("generic", "selfadjoint", "normal", "hyponormal", "square-zero", "commuting")


@dataclass(frozen=True)
class EnsembleSpec:
    """Random ensemble description.

    ``rank`` is ``"full"``, ``"deficient"`` (uniform in ``1..dim-1``),
    ``"mixed"`` (either, with equal odds) or a fixed integer. Each sample
    draws from its own child of ``numpy.random.SeedSequence(seed)``, so the
    stream for sample ``i`` does not depend on the sample count or on
    parallel scheduling.
    """

    family: str = "generic"
    samples: int = 100
    dims: Tuple[int, int] = (2, 6)
    rank: object = "mixed"
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        lo, hi = self.dims
        if not 1 <= lo <= hi:
            raise ValueError(f"invalid dimension range {self.dims}")
        if self.samples < 0:
            raise ValueError("samples must be non-negative")


def _cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _pick_rank(rng, dim, policy):
    if isinstance(policy, (int, np.integer)) and not isinstance(policy, bool):
        if not 1 <= policy <= dim:
            raise ValueError(f"rank {policy} outside 1..{dim}")
        return int(policy)
    if policy == "mixed":
        policy = "full" if rng.random() < 0.5 else "deficient"
    if policy == "full" or dim == 1:
        return dim
    if policy == "deficient":
        return int(rng.integers(1, dim))
    raise ValueError(f"unknown rank policy {policy!r}")


def random_weight(rng, dim, rank=None):
    """Wishart-type PSD weight ``G* G`` truncated to the given rank."""
    rank = dim if rank is None else rank
    G = _cgauss(rng, dim + 3, dim)
    w, V = np.linalg.eigh(G.conj().T @ G)
    Vr, d = V[:, dim - rank :], w[dim - rank :]
    A = (Vr * d) @ Vr.conj().T
    return 0.5 * (A + A.conj().T)


def _blocks(ctx):
    return ctx.range_basis, ctx.null_basis


def random_member(rng, ctx):
    """Random T with ``T(N(A)) ⊆ N(A)``: the N(A) -> R(A) block is zeroed."""
    V = np.hstack(_blocks(ctx))
    B = _cgauss(rng, ctx.dim, ctx.dim)
    B[: ctx.rank, ctx.rank :] = 0.0
    return V @ B @ V.conj().T


def _null_part(rng, ctx):
    """Random operator with range in N(A); adding it keeps membership."""
    Vn = ctx.null_basis
    if Vn.shape[1] == 0:
        return np.zeros((ctx.dim, ctx.dim), dtype=complex)
    return Vn @ _cgauss(rng, Vn.shape[1], ctx.dim) @ np.hstack(_blocks(ctx)).conj().T


def _random_unitary(rng, n):
    Q, R = np.linalg.qr(_cgauss(rng, n, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def sample_family(rng, ctx, family):
    """Draw T (or a commuting pair) from ``family`` for the weight in ``ctx``.

    Returns a tuple of operators: one entry except for ``"commuting"``.
    """
    r = ctx.rank
    if family == "generic":
        return (random_member(rng, ctx), random_member(rng, ctx))
    if family == "normal":
        U = _random_unitary(rng, r)
        N = (U * _cgauss(rng, r)) @ U.conj().T
        return (lift(ctx, N),)
    if family == "hyponormal":
        # normal compression plus arbitrary blocks into N(A)
        U = _random_unitary(rng, r)
        N = (U * _cgauss(rng, r)) @ U.conj().T
        return (lift(ctx, N) + _null_part(rng, ctx),)
    if family == "selfadjoint":
        H0 = _cgauss(rng, r, r)
        H = ctx.range_basis @ (H0 + H0.conj().T) @ ctx.range_basis.conj().T
        return (ctx.A_pinv @ H + _null_part(rng, ctx),)
    if family == "square-zero":
        S = np.zeros((r, r), dtype=complex)
        if r >= 2:
            k = int(rng.integers(1, r))
            S[:k, k:] = _cgauss(rng, k, r - k)
            U = _random_unitary(rng, r)
            S = U @ S @ U.conj().T
        return (lift(ctx, S) + _null_part(rng, ctx),)
    if family == "commuting":
        M = _cgauss(rng, r, r) / math.sqrt(r)
        a, b, c = _cgauss(rng, 3)
        I = np.eye(r)
        return (lift(ctx, M), lift(ctx, a * M @ M + b * M + c * I))
    raise ValueError(f"unknown family {family!r}")


def verify_instance(ctx, T, instance_id="instance"):
    """Evaluate every radius inequality on one pair ``(A, T)``."""
    T = ctx.check_operator(T)
    cfg = ctx.cfg
    report = VerificationReport(instance_id)
    member = is_a_bounded(ctx, T)
    douglas = douglas_residual(ctx, T)
    report.add(_agree("douglas-equivalence", "membership", member.holds, douglas.holds, member.witness, douglas.witness))
    if not member.holds:
        report.notes.append("T does not leave N(A) invariant: omega_A = inf, remaining checks skipped")
        return report

    S = compress(ctx, T)
    norm = _norm2(S)
    omega = classical_numerical_radius(S, cfg)
    r = classical_spectral_radius(S, cfg)
    report.add(_leq("r<=omega", "sandwich", r, omega))
    report.add(_leq("omega<=norm", "sandwich", omega, norm))
    report.add(_leq("norm<=2omega", "sandwich", norm, 2.0 * omega))
    report.add(_leq("omega>=norm/2", "sandwich", 0.5 * norm, omega))
    report.add(_leq("omega<=kittaneh", "kittaneh", omega, 0.5 * (norm + math.sqrt(_norm2(S @ S)))))

    powers = [np.eye(S.shape[0], dtype=complex), S]
    for _ in range(2, 17):
        powers.append(powers[-1] @ S)
    pnorms = [_norm2(P) for P in powers]
    for n in range(2, 6):
        report.add(_leq(f"power-inequality-{n}", "power", classical_numerical_radius(powers[n], cfg), omega**n))
    for k in range(2, 5):
        report.add(_eq(f"r(T^{k})=r^{k}", "spectral-power", classical_spectral_radius(powers[k], cfg), r**k, POWER_EQ_TOL))
    for m in range(1, 9):
        for n in range(m, 9):
            report.add(_leq(f"fekete-{m}-{n}", "subadditive", pnorms[m + n], pnorms[m] * pnorms[n]))
    # r of a defective matrix is only resolved to about sqrt(eps) * ||S||
    for n in (1, 2, 4, 8, 16):
        report.add(_leq(f"gelfand-{n}", "gelfand", r, pnorms[n] ** (1.0 / n), POWER_EQ_TOL))

    hyp = is_a_hyponormal(ctx, T)
    dual = hyponormal_dual_check(ctx, T)
    report.add(_agree("hyponormal-dual", "hyponormal", hyp.holds, dual.holds, hyp.witness, dual.witness))

    omega_max = a_maximal_numerical_radius(ctx, T)
    report.add(_leq("omega_max<=omega", "maximal", omega_max, omega))
    try:
        normaloid = is_a_normaloid(ctx, T)
        by_wmax = abs(omega - omega_max) <= EQ_TOL * _scale(omega)
        report.add(_agree("normaloid<=>omega_max", "maximal", normaloid.holds, by_wmax, normaloid.witness, omega - omega_max))
    except ChainViolation as exc:
        report.add(CheckRecord("normaloid-certificates", "normaloid", 0.0, 0.0, -1.0, False, 0.0))
        report.notes.append(str(exc))
    return report


def _family_checks(ctx, family, ops, report):
    cfg = ctx.cfg
    T = ops[0]
    S = compress(ctx, T)
    norm = _norm2(S)
    if family == "generic":
        S2 = compress(ctx, ops[1])
        report.add(_leq("submultiplicative", "norm", _norm2(S @ S2), norm * _norm2(S2)))
        return
    if family == "commuting":
        S2 = compress(ctx, ops[1])
        r1, r2 = classical_spectral_radius(S, cfg), classical_spectral_radius(S2, cfg)
        report.add(_leq("r(T+S)<=r(T)+r(S)", "commuting", classical_spectral_radius(S + S2, cfg), r1 + r2))
        report.add(_leq("r(TS)<=r(T)r(S)", "commuting", classical_spectral_radius(S @ S2, cfg), r1 * r2))
        return
    omega = classical_numerical_radius(S, cfg)
    r = classical_spectral_radius(S, cfg)
    try:
        result = classify_full(ctx, T)
    except ChainViolation as exc:
        report.add(CheckRecord("chain", "inclusions", 0.0, 0.0, -1.0, False, 0.0))
        report.notes.append(str(exc))
        return
    flag = lambda name, value: report.add(_agree(name, "class", value, True))
    if family == "normal":
        flag("a_normal", result.a_normal)
        report.add(_eq("r=omega", "normal", r, omega))
        report.add(_eq("omega=norm", "normal", omega, norm))
    elif family == "hyponormal":
        flag("a_hyponormal", result.a_hyponormal)
        flag("a_paranormal", result.a_paranormal)
    elif family == "selfadjoint":
        flag("a_selfadjoint", result.a_selfadjoint)
        flag("a_paranormal", result.a_paranormal)
        report.add(_eq("r=omega", "selfadjoint", r, omega))
        report.add(_eq("omega=norm", "selfadjoint", omega, norm))
    elif family == "square-zero":
        report.add(_eq("omega=norm/2", "square-zero", omega, 0.5 * norm))


def _run_sample(spec, cfg, index, child):
    rng = np.random.default_rng(child)
    dim = int(rng.integers(spec.dims[0], spec.dims[1] + 1))
    rank = _pick_rank(rng, dim, spec.rank)
    A = random_weight(rng, dim, rank)
    sid = f"{spec.family}-{spec.seed}-{index}"
    try:
        ctx = make_context(A, cfg)
        ops = sample_family(rng, ctx, spec.family)
        report = verify_instance(ctx, ops[0], sid)
        _family_checks(ctx, spec.family, ops, report)
    except SemiopError as exc:
        report = VerificationReport(sid)
        report.add(CheckRecord("exception", type(exc).__name__, 0.0, 0.0, -1.0, False, 0.0))
        report.notes.append(str(exc))
        ops = ()
    return report, A, ops


def _encode_matrix(M):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def _threads():
    try:
        return max(1, int(os.environ.get("SEMIOP_THREADS", "1")))
    except ValueError:
        return 1


def verify_ensemble(spec, cfg=DEFAULT_CONFIG, threads=None):
    """Run :func:`verify_instance` plus family checks on every sample.

    Per-check records are merged by name, keeping the worst slack, so the
    aggregate report stays small. Failing samples are kept in full.
    """
    children = np.random.SeedSequence(spec.seed).spawn(spec.samples)
    threads = threads or _threads()
    jobs = [(i, c) for i, c in enumerate(children)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _run_sample(spec, cfg, *job), jobs))
    else:
        results = [_run_sample(spec, cfg, *job) for job in jobs]

    summary = VerificationReport(f"ensemble-{spec.family}-seed{spec.seed}", samples=spec.samples)
    worst: Dict[str, CheckRecord] = {}
    for report, A, ops in results:
        for c in report.checks:
            if c.name not in worst or c.slack < worst[c.name].slack:
                worst[c.name] = c
        if not report.passed:
            summary.failures += 1
            summary.failed_instances.append(
                {
                    "instance_id": report.instance_id,
                    "A": _encode_matrix(A),
                    "T": [_encode_matrix(T) for T in ops],
                    "failed": [c.as_dict() for c in report.failed_checks()],
                    "notes": report.notes,
                }
            )
    for name in sorted(worst):
        summary.add(worst[name])
    return summary


@dataclass
class DemoPair:
    """A generated ``(A, T)`` pair; unpacks as ``A, T``."""

    name: str
    A: np.ndarray
    T: np.ndarray
    certificates: Dict[str, object] = field(default_factory=dict)
    table: List[Tuple] = field(default_factory=list)
    columns: Tuple[str, ...] = ()

    def __iter__(self):
        yield self.A
        yield self.T


_FACTORIAL_LIMIT = 80


def demo_ex01(half_n, cfg=DEFAULT_CONFIG):
    """Truncation with ``ATA = 0`` but ``||T^2 A e_2n||_A = sqrt(n) ||A e_2n||_A``.

    Basis ``e_1 .. e_{2 half_n + 2}``; ``A = diag(0, 1, 0, 1/2!, 0, 1/3!, ...)``
    and ``T`` is the backward shift ``T e_k = e_{k-1}``, ``T e_1 = 0``.
    """
    if int(half_n) != half_n or half_n < 2:
        raise ValueError("half_n must be an integer >= 2")
    half_n = int(half_n)
    dim = 2 * half_n + 2
    diag = np.zeros(dim)
    # e_{2n} sits at index 2n - 1; weight 1/n!
    log_w = np.array([-math.lgamma(n + 1) for n in range(1, half_n + 2)])
    diag[1::2] = np.exp(log_w)
    A = np.diag(diag).astype(complex)
    T = np.eye(dim, k=1, dtype=complex)

    ctx = make_context(A, cfg)
    rows = []
    for n in range(2, half_n + 1):
        if half_n <= _FACTORIAL_LIMIT:
            e = np.zeros(dim, dtype=complex)
            e[2 * n - 1] = 1.0
            Ae = A @ e
            lhs = math.sqrt(np.vdot(T @ T @ Ae, A @ (T @ T @ Ae)).real)
            rhs = math.sqrt(np.vdot(Ae, A @ Ae).real)
            ratio = lhs / rhs
        else:
            # log ||T^2 A e_2n||_A - log ||A e_2n||_A
            ratio = math.exp(0.5 * (math.lgamma(n + 1) - math.lgamma(n)))
        rows.append((n, ratio, math.sqrt(n)))
    ATA = A @ T @ A
    certs = {
        "ATA_max_abs": float(np.max(np.abs(ATA))),
        "ATA_is_zero": bool(not np.any(ATA)),
        "a_norm": a_operator_seminorm(ctx, T, require_member_=False),
        "member": is_a_bounded(ctx, T).holds,
        "omega_A": INFINITE if not is_a_bounded(ctx, T).holds else None,
        "max_ratio_error": max(abs(a - b) for _, a, b in rows),
    }
    return DemoPair("ex01", A, T, certs, rows, ("n", "ratio", "sqrt(n)"))


def demo_shift_z(n_max, cfg=DEFAULT_CONFIG, samples=10_000, seed=0):
    """Truncation on indices ``-n_max .. n_max`` with ``T e_n = n^{-1/2} e_{-n}``.

    ``A_n = 1/n^2`` for ``n >= 1``, ``A_0 = 0`` and ``A_n = 1/|n|`` for
    ``n <= -1``. The growth ratio ``||A T e_n||^2 / ||A e_n||^2 = n`` is
    the certificate that the untruncated operator has no A-adjoint.
    """
    if int(n_max) != n_max or n_max < 1:
        raise ValueError("n_max must be an integer >= 1")
    n_max = int(n_max)
    dim = 2 * n_max + 1
    idx = np.arange(-n_max, n_max + 1)
    a = np.zeros(dim)
    pos, neg = idx >= 1, idx <= -1
    a[pos] = 1.0 / idx[pos].astype(float) ** 2
    a[neg] = 1.0 / np.abs(idx[neg]).astype(float)
    A = np.diag(a).astype(complex)
    T = np.zeros((dim, dim), dtype=complex)
    for n in range(1, n_max + 1):
        T[-n + n_max, n + n_max] = 1.0 / math.sqrt(n)

    rows = []
    for n in range(1, n_max + 1):
        e = np.zeros(dim, dtype=complex)
        e[n + n_max] = 1.0
        ate = float(np.linalg.norm(A @ T @ e) ** 2)
        ae = float(np.linalg.norm(A @ e) ** 2)
        rows.append((n, ate, n**-3.0, ae, n**-4.0, ate / ae))

    rng = np.random.default_rng(seed)
    X = _cgauss(rng, dim, samples)
    root = np.sqrt(a)[:, None]
    tx = np.linalg.norm(root * (T @ X), axis=0)
    x = np.linalg.norm(root * X, axis=0)
    certs = {
        "max_contraction_excess": float(np.max(tx - x)),
        "samples": samples,
        "T_e0_zero": bool(not np.any(T[:, n_max])),
        "max_norm_error": max(max(abs(r[1] - r[2]), abs(r[3] - r[4])) for r in rows),
        "growth_ratios": [r[5] for r in rows],
    }
    return DemoPair("shift-z", A, T, certs, rows, ("n", "|ATe_n|^2", "n^-3", "|Ae_n|^2", "n^-4", "ratio"))


DEMOS = {"ex01": demo_ex01, "shift-z": demo_shift_z}


@dataclass
class RegistryEntry:
    name: str
    A: np.ndarray
    T: np.ndarray
    expected: Dict[str, object]
    tolerances: Dict[str, float]
    tag: str
    notes: str = ""


def paper_registry():
    """The five finite worked examples with their expected values."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    A3 = np.array([[2, 0, 2], [0, 1, 0], [2, 0, 2]], dtype=complex)
    T3 = np.array([[1, 0, 1], [0, 0, 0], [0, 0, 0]], dtype=complex)
    return [
        RegistryEntry(
            "jordan",
            np.eye(2, dtype=complex),
            np.array([[1, 1], [0, 1]], dtype=complex),
            {"r": 1.0, "omega": 1.5, "norm": phi, "a_spectraloid": False, "a_normaloid": False},
            {"r": 1e-6, "omega": 1e-6, "norm": 1e-9},
            "both radius inequalities strict",
        ),
        RegistryEntry(
            "spectraloid-not-normaloid",
            np.eye(3, dtype=complex),
            np.array([[1, 0, 0], [0, 0, 2], [0, 0, 0]], dtype=complex),
            {"r": 1.0, "omega": 1.0, "norm": 2.0, "a_spectraloid": True, "a_normaloid": False},
            {"r": 1e-6, "omega": 1e-6, "norm": 1e-9},
            "r = omega < norm",
        ),
        RegistryEntry(
            "swap",
            np.diag([1.0, 0.0]).astype(complex),
            np.array([[0, 1], [1, 0]], dtype=complex),
            {"member": False, "omega": INFINITE},
            {},
            "non-member with infinite A-numerical radius",
        ),
        RegistryEntry(
            "hyponormal-not-normal",
            np.array([[1, 1], [1, 1]], dtype=complex),
            np.array([[2, 2], [0, 0]], dtype=complex),
            {
                "sharp": np.array([[1, 1], [1, 1]], dtype=complex),
                "a_hyponormal": True,
                "a_normal": False,
                "a_normaloid": True,
                "r": 2.0,
                "norm": 2.0,
            },
            {"sharp": 1e-12, "r": 1e-6, "norm": 1e-9},
            "A[T#, T] = 0 while [T#, T] != 0",
        ),
        RegistryEntry(
            "a-selfadjoint",
            A3,
            T3,
            {
                "sharp": np.array([[0.5, 0, 0.5], [0, 0, 0], [0.5, 0, 0.5]], dtype=complex),
                "a_selfadjoint": True,
                "a_normal": False,
                "a_hyponormal": True,
                "a_paranormal": True,
                "a_normaloid": True,
                "a_spectraloid": True,
                "r": 1.0,
                "omega": 1.0,
                "norm": 1.0,
            },
            {"sharp": 1e-12, "r": 1e-7, "omega": 1e-7, "norm": 1e-7},
            "A-selfadjoint, hence r_A = omega_A = ||T||_A",
            notes=(
                "T# = A^+ T* A is [[1/2,0,1/2],[0,0,0],[1/2,0,1/2]]; the reduced operator "
                "is diag(0, 1), which is normal, so T is A-hyponormal. [T#, T] != 0, so "
                "T is not A-normal."
            ),
        ),
    ]
