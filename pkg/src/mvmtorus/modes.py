"""Unimodality certification and exhaustive mode discovery.

Two complementary tools:

* :func:`certify_unimodal` checks sufficient conditions on the matrix
  P = diag(kappa) - Lambda (positive definiteness, and the stronger
  row-dominance condition kappa_i > sum_j |lam_ij|) and issues a
  certificate.  The conditions are sufficient only; an inconclusive
  certificate does not assert multimodality.

* :func:`critical_points` locates the critical points of the log-density
  exponent by damped multi-start Newton iteration on the torus and
  classifies each one through its Hessian spectrum, flagging extended
  (degenerate) maxima such as flat ridges.

The search is organized in three passes per start (ascent toward maxima,
descent toward minima, and a plain root pass on the gradient that also
lands on saddles).  All passes run batched over the start set with plain
numpy; for a fixed seed the result is deterministic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .model import (
    MvmParams,
    TorusPoint,
    angular_distance,
    as_torus_point,
    exponent_many,
    grad_many,
    hessian_f,
    hessian_many,
    exponent_f,
    grad_f,
    wrap_angles,
)

__all__ = [
    "Verdict",
    "PointKind",
    "UnimodalityCertificate",
    "CriticalPoint",
    "SearchConfig",
    "SearchMeta",
    "ModeReport",
    "certify_unimodal",
    "classify_critical",
    "critical_points",
    "deduplicate",
]

#: sup-norm gradient level below which the damped passes hand over to polishing
_POLISH_TRIGGER = 1e-6
#: rounds of pseudo-inverse Newton polishing after each damped pass
_POLISH_ROUNDS = 8
#: relative slack when testing monotone improvement of f (absorbs roundoff)
_F_SLACK = 1e-14
#: largest per-coordinate step the solver will take
_MAX_STEP = np.pi / 2


class Verdict(enum.Enum):
    CERTIFIED_UNIMODAL = "CertifiedUnimodal"
    CERTIFIED_UNIMODAL_WITH_MINIMUM = "CertifiedUnimodalWithMinimum"
    INCONCLUSIVE = "Inconclusive"


class PointKind(enum.Enum):
    MAXIMUM = "Maximum"
    MINIMUM = "Minimum"
    SADDLE = "Saddle"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class UnimodalityCertificate:
    """Outcome of the sufficient unimodality tests.

    ``prop1_holds``: P is positive definite, so the density has its single
    maximum at mu.  ``cor1_holds``: every kappa_i strictly dominates its
    coupling row sum, which additionally pins the unique minimum at the
    antipode of mu.  Row dominance implies definiteness, so ``cor1_holds``
    implies ``prop1_holds`` on every certificate.
    """

    p_matrix: np.ndarray
    prop1_holds: bool
    cor1_holds: bool
    p_eigenvalues: np.ndarray
    gershgorin: spectral.GershgorinReport
    verdict: Verdict


def certify_unimodal(params: MvmParams) -> UnimodalityCertificate:
    """Build P = diag(kappa) - Lambda and run both sufficient tests."""
    p_matrix = params.p_matrix()
    report = spectral.gershgorin(p_matrix)
    # row dominance: centers are exactly kappa (Lambda has zero diagonal)
    cor1 = bool(np.all(report.centers > report.radii))
    # dominance implies definiteness exactly, even when the margin is below
    # the numerical Cholesky tolerance
    prop1 = cor1 or spectral.is_positive_definite(p_matrix)
    eigenvalues = spectral.sym_eigen(p_matrix).values
    if cor1:
        verdict = Verdict.CERTIFIED_UNIMODAL_WITH_MINIMUM
    elif prop1:
        verdict = Verdict.CERTIFIED_UNIMODAL
    else:
        verdict = Verdict.INCONCLUSIVE
    return UnimodalityCertificate(
        p_matrix=p_matrix,
        prop1_holds=prop1,
        cor1_holds=cor1,
        p_eigenvalues=eigenvalues,
        gershgorin=report,
        verdict=verdict,
    )


@dataclass(frozen=True)
class CriticalPoint:
    """A located zero of the gradient with its spectral classification."""

    theta: TorusPoint
    f_value: float
    grad_norm: float
    hessian_eigenvalues: np.ndarray
    kind: PointKind


def _classify_eigenvalues(eigenvalues: np.ndarray, tol: float) -> PointKind:
    if np.all(eigenvalues < -tol):
        return PointKind.MAXIMUM
    if np.all(eigenvalues > tol):
        return PointKind.MINIMUM
    if np.any(np.abs(eigenvalues) <= tol):
        return PointKind.DEGENERATE
    return PointKind.SADDLE


def _degeneracy_threshold(hessian: np.ndarray, degeneracy_tol: float) -> float:
    norm_inf = float(np.max(np.sum(np.abs(hessian), axis=-1)))
    return degeneracy_tol * max(1.0, norm_inf)


def classify_critical(
    params: MvmParams,
    theta,
    degeneracy_tol: float = 1e-6,
    grad_tol: float = 1e-8,
) -> CriticalPoint:
    """Classify a point already known to be critical.

    Raises ``ValueError`` when the gradient sup-norm at ``theta`` exceeds
    ``grad_tol``.  ``degeneracy_tol`` is relative; the effective threshold
    is ``degeneracy_tol * max(1, inf-norm of the Hessian)``.
    """
    theta = as_torus_point(theta)
    gradient = grad_f(params, theta)
    grad_norm = float(np.max(np.abs(gradient)))
    if grad_norm > grad_tol:
        raise ValueError(
            f"theta is not critical: |grad|_inf = {grad_norm:.3e} > {grad_tol:.0e}"
        )
    hessian = hessian_f(params, theta)
    eigenvalues = spectral.sym_eigen(hessian).values
    kind = _classify_eigenvalues(
        eigenvalues, _degeneracy_threshold(hessian, degeneracy_tol)
    )
    return CriticalPoint(
        theta=theta,
        f_value=exponent_f(params, theta),
        grad_norm=grad_norm,
        hessian_eigenvalues=eigenvalues,
        kind=kind,
    )


@dataclass(frozen=True)
class SearchConfig:
    """Tuning knobs for :func:`critical_points`.

    The start set is the lattice ``mu + {pi/m + k*2pi/m}^p`` (anchored at
    odd multiples of pi/m so starts never coincide with the kappa=0
    extremum grid), truncated to ``max_lattice_starts`` by a seeded
    subsample when ``m**p`` exceeds it, plus ``n_random_starts`` seeded
    uniform starts (defaults to 32 for p <= 4, else 256).
    """

    starts_per_dim: int = 4
    max_lattice_starts: int = 256
    n_random_starts: int | None = None
    grad_tol: float = 1e-10
    max_iter: int = 80
    max_halvings: int = 30
    dedup_radius: float = 1e-4
    degeneracy_tol: float = 1e-6
    seed: int = 0


@dataclass(frozen=True)
class SearchMeta:
    starts_used: int
    converged: int
    seed: int


@dataclass(frozen=True)
class ModeReport:
    """All located critical points, deduplicated on the torus."""

    criticals: list[CriticalPoint]
    n_maxima: int
    extended_mode_suspected: bool
    search_meta: SearchMeta

    @property
    def maxima(self) -> list[CriticalPoint]:
        return [c for c in self.criticals if c.kind is PointKind.MAXIMUM]

    @property
    def minima(self) -> list[CriticalPoint]:
        return [c for c in self.criticals if c.kind is PointKind.MINIMUM]

    @property
    def degenerate(self) -> list[CriticalPoint]:
        return [c for c in self.criticals if c.kind is PointKind.DEGENERATE]


# ---------------------------------------------------------------------------
# solver internals


def _start_points(params: MvmParams, cfg: SearchConfig, rng) -> np.ndarray:
    p = params.p
    m = cfg.starts_per_dim
    offsets = np.pi / m + np.arange(m) * (2.0 * np.pi / m)
    grids = np.meshgrid(*([offsets] * p), indexing="ij")
    lattice = np.stack([g.ravel() for g in grids], axis=-1)
    if len(lattice) > cfg.max_lattice_starts:
        pick = rng.choice(len(lattice), size=cfg.max_lattice_starts, replace=False)
        lattice = lattice[np.sort(pick)]
    n_random = cfg.n_random_starts
    if n_random is None:
        n_random = 32 if p <= 4 else 256
    random_starts = rng.uniform(0.0, 2.0 * np.pi, size=(n_random, p))
    starts = np.vstack([lattice, random_starts]) if n_random else lattice
    return wrap_angles(starts + params.mu.angles)


def _eigh_directions(hessians: np.ndarray, gradients: np.ndarray):
    """Eigen-decompose a stack of Hessians and return (w, gproj, habs) where
    gproj are the gradients rotated into the eigenbases."""
    w, v = np.linalg.eigh(hessians)
    gproj = np.einsum("nik,ni->nk", v, gradients)
    habs = np.maximum(1.0, np.max(np.sum(np.abs(hessians), axis=2), axis=1))
    return w, v, gproj, habs


def _cap_steps(steps: np.ndarray) -> np.ndarray:
    mags = np.max(np.abs(steps), axis=1)
    scale = np.where(mags > _MAX_STEP, _MAX_STEP / np.maximum(mags, 1e-300), 1.0)
    return steps * scale[:, None]


def _damped_extremum_pass(
    params: MvmParams, starts: np.ndarray, sign: float, cfg: SearchConfig
) -> np.ndarray:
    """Monotone ascent (sign=+1) or descent (sign=-1) on f.

    Newton steps are taken only where the Hessian has the definiteness
    matching the target; elsewhere a capped gradient step is used.  Steps
    are halved until sign*f does not decrease (up to roundoff slack); a
    start that cannot improve after ``max_halvings`` halvings is frozen.
    """
    th = starts.copy()
    alive = np.ones(len(th), dtype=bool)
    for _ in range(cfg.max_iter):
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        cur = th[idx]
        g = grad_many(params, cur)
        gnorm = np.max(np.abs(g), axis=1)
        done = gnorm <= _POLISH_TRIGGER
        alive[idx[done]] = False
        keep = ~done
        if not keep.any():
            continue
        idx = idx[keep]
        cur = cur[keep]
        g = g[keep]

        h = hessian_many(params, cur)
        w, v, gproj, habs = _eigh_directions(h, g)
        floor = 1e-8 * habs
        definite = (
            np.all(w < -floor[:, None], axis=1)
            if sign > 0
            else np.all(w > floor[:, None], axis=1)
        )
        newton = -np.einsum("nik,nk->ni", v, gproj / np.where(w == 0.0, 1.0, w))
        small = np.max(np.abs(newton), axis=1) <= _MAX_STEP
        use_newton = definite & small
        direction = np.where(use_newton[:, None], newton, _cap_steps(sign * g))

        f0 = exponent_many(params, cur)
        slack = _F_SLACK * np.maximum(1.0, np.abs(f0))
        step = np.ones(len(cur))
        pending = np.ones(len(cur), dtype=bool)
        moved = np.zeros(len(cur), dtype=bool)
        new = cur.copy()
        for _ in range(cfg.max_halvings + 1):
            if not pending.any():
                break
            rows = np.flatnonzero(pending)
            cand = cur[rows] + step[rows, None] * direction[rows]
            f1 = exponent_many(params, cand)
            ok = sign * (f1 - f0[rows]) >= -slack[rows]
            new[rows[ok]] = cand[ok]
            moved[rows[ok]] = True
            pending[rows[ok]] = False
            step[rows[~ok]] *= 0.5
        th[idx] = wrap_angles(new)
        alive[idx[~moved]] = False  # stalled: no step length improved f
    return th


def _damped_root_pass(
    params: MvmParams, starts: np.ndarray, cfg: SearchConfig
) -> np.ndarray:
    """Newton iteration on grad f = 0, damped on the residual norm; this
    pass converges to saddles as readily as to extrema."""
    th = starts.copy()
    alive = np.ones(len(th), dtype=bool)
    for _ in range(cfg.max_iter):
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        cur = th[idx]
        g = grad_many(params, cur)
        gnorm = np.max(np.abs(g), axis=1)
        done = gnorm <= _POLISH_TRIGGER
        alive[idx[done]] = False
        keep = ~done
        if not keep.any():
            continue
        idx = idx[keep]
        cur = cur[keep]
        g = g[keep]
        gnorm = gnorm[keep]

        h = hessian_many(params, cur)
        w, v, gproj, habs = _eigh_directions(h, g)
        floor = 1e-10 * habs
        nonsing = np.min(np.abs(w), axis=1) >= floor
        newton = -np.einsum("nik,nk->ni", v, gproj / np.where(w == 0.0, 1.0, w))
        small = np.max(np.abs(newton), axis=1) <= _MAX_STEP
        use_newton = nonsing & small
        # fallback: steepest descent on 0.5*|grad|^2, which is -H g
        fallback = _cap_steps(-np.einsum("nij,nj->ni", h, g))
        direction = np.where(use_newton[:, None], newton, fallback)

        step = np.ones(len(cur))
        pending = np.ones(len(cur), dtype=bool)
        moved = np.zeros(len(cur), dtype=bool)
        new = cur.copy()
        for _ in range(cfg.max_halvings + 1):
            if not pending.any():
                break
            rows = np.flatnonzero(pending)
            cand = cur[rows] + step[rows, None] * direction[rows]
            g1 = np.max(np.abs(grad_many(params, cand)), axis=1)
            ok = g1 <= (1.0 - 1e-4 * step[rows]) * gnorm[rows]
            new[rows[ok]] = cand[ok]
            moved[rows[ok]] = True
            pending[rows[ok]] = False
            step[rows[~ok]] *= 0.5
        th[idx] = wrap_angles(new)
        alive[idx[~moved]] = False
    return th


def _polish(params: MvmParams, points: np.ndarray) -> np.ndarray:
    """A few rounds of pseudo-inverse Newton on the gradient.

    Eigen-directions with |eigenvalue| below 1e-8 * max(1, |H|_inf) are
    dropped, so flat ridge directions are left untouched while the
    transverse error contracts quadratically down to roundoff.  The
    iterate with the smallest gradient norm wins.
    """
    best = points.copy()
    best_norm = np.max(np.abs(grad_many(params, best)), axis=1)
    cur = points.copy()
    for _ in range(_POLISH_ROUNDS):
        g = grad_many(params, cur)
        h = hessian_many(params, cur)
        w, v, gproj, habs = _eigh_directions(h, g)
        thresh = 1e-8 * habs
        winv = np.where(np.abs(w) > thresh[:, None], 1.0 / np.where(w == 0.0, 1.0, w), 0.0)
        cur = wrap_angles(cur - _cap_steps(np.einsum("nik,nk->ni", v, winv * gproj)))
        norm = np.max(np.abs(grad_many(params, cur)), axis=1)
        better = norm < best_norm
        best[better] = cur[better]
        best_norm[better] = norm[better]
    return best


def deduplicate(criticals: list[CriticalPoint], radius: float) -> list[CriticalPoint]:
    """Greedy first-kept dedup under the angular sup-metric.

    Kept points are pairwise at least ``radius`` apart, which makes the
    operation idempotent.
    """
    kept: list[CriticalPoint] = []
    for cand in criticals:
        if all(cand.theta.distance(k.theta) >= radius for k in kept):
            kept.append(cand)
    return kept


def critical_points(
    params: MvmParams, cfg: SearchConfig | None = None
) -> ModeReport:
    """Locate and classify the critical points of the exponent.

    Non-convergent starts are simply dropped (counted in ``search_meta``);
    every reported point re-checks ``|grad|_inf < cfg.grad_tol`` on a fresh
    evaluation.  Results are deterministic for a fixed ``cfg.seed``.
    """
    if cfg is None:
        cfg = SearchConfig()
    rng = np.random.default_rng(cfg.seed)
    starts = _start_points(params, cfg, rng)

    candidates = []
    for pass_points in (
        _damped_extremum_pass(params, starts, +1.0, cfg),
        _damped_extremum_pass(params, starts, -1.0, cfg),
        _damped_root_pass(params, starts, cfg),
    ):
        candidates.append(_polish(params, pass_points))
    pool = np.vstack(candidates)

    grads = grad_many(params, pool)
    norms = np.max(np.abs(grads), axis=1)
    converged_mask = norms < cfg.grad_tol
    converged = pool[converged_mask]
    converged_norms = norms[converged_mask]

    points: list[CriticalPoint] = []
    for angles, gnorm in zip(converged, converged_norms):
        theta = TorusPoint(angles)
        hessian = hessian_f(params, theta)
        eigenvalues = spectral.sym_eigen(hessian).values
        kind = _classify_eigenvalues(
            eigenvalues, _degeneracy_threshold(hessian, cfg.degeneracy_tol)
        )
        points.append(
            CriticalPoint(
                theta=theta,
                f_value=exponent_f(params, theta),
                grad_norm=float(gnorm),
                hessian_eigenvalues=eigenvalues,
                kind=kind,
            )
        )

    unique = deduplicate(points, cfg.dedup_radius)
    unique.sort(
        key=lambda c: (-c.f_value, c.kind.value, tuple(c.theta.angles.tolist()))
    )
    n_maxima = sum(1 for c in unique if c.kind is PointKind.MAXIMUM)
    extended = any(c.kind is PointKind.DEGENERATE for c in unique)
    meta = SearchMeta(
        starts_used=len(starts),
        converged=int(converged_mask.sum()),
        seed=cfg.seed,
    )
    return ModeReport(
        criticals=unique,
        n_maxima=n_maxima,
        extended_mode_suspected=extended,
        search_meta=meta,
    )
