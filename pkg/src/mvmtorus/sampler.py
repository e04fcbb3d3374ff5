"""Exact rejection sampling for the multivariate von Mises distribution in
the positive-definite-P (certified unimodal) regime.

Proposal: each coordinate independently follows the doubled-angle density

    g_1(t) = exp(b/4 * cos(2 t)) / (2 pi I0(b/4)),

where b is a positive lower bound on the eigenvalues of P.  A draw is
produced by sampling t_tilde ~ VM(0, b/4) on (-pi, pi], halving it, adding
pi with probability 1/2 and wrapping to [0, 2*pi).  The envelope constant

    log C = -p*b/4 + sum(kappa) + p * log(2 pi I0(b/4))

satisfies exp(f) <= C g everywhere, so accepting a proposal theta with
probability exp(sum kappa_i (c_i - 1) + 0.5 s^T (Lambda + b I) s) yields
exact draws; accepted proposals are shifted by mu on output.

Reproducibility contract: a batch is produced in fixed-size blocks of
``BLOCK_SIZE`` draws, each block consuming its own generator spawned from
the master seed.  Within a block, each attempt chunk consumes, in order,
(1) the von Mises block, (2) the +pi coin block, (3) the uniform block.
Worker threads only schedule whole blocks and results concatenate in block
order, so output is bit-identical for a fixed seed no matter how many
workers run.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import i0 as _scipy_i0, i0e as _scipy_i0e

from . import oracle, spectral
from .model import (
    MvmParams,
    TorusPoint,
    TWO_PI,
    as_torus_point,
    trig_cache,
    wrap_angles,
)

__all__ = [
    "BLOCK_SIZE",
    "NotPositiveDefiniteError",
    "BoundViolationError",
    "AcceptanceStallError",
    "ProposalSpec",
    "SampleBatch",
    "AcceptanceForecast",
    "bessel_i0",
    "log_bessel_i0",
    "sample_vm1",
    "sample_proposal_g",
    "sample_proposal_batch",
    "log_proposal_density",
    "log_envelope_constant",
    "acceptance_probability",
    "sample_mvm",
    "forecast_acceptance",
]

#: draws per seeding block; fixed so the stream layout is independent of
#: worker count
BLOCK_SIZE = 4096
#: stall guard: a batch may not consume more than n * 1e6 proposals
STALL_FACTOR = 1e6


class NotPositiveDefiniteError(ValueError):
    """P = diag(kappa) - Lambda is not positive definite; the rejection
    sampler does not apply.  Run modes.certify_unimodal for diagnostics."""


class BoundViolationError(RuntimeError):
    """An acceptance probability exceeded 1, signalling an invalid
    eigenvalue lower bound."""


class AcceptanceStallError(RuntimeError):
    """The rejection loop exceeded the proposal budget; the eigenvalue
    bound is likely far too small for this distribution."""


def bessel_i0(x):
    """Modified Bessel function I0 (order zero, first kind); x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("bessel_i0 requires x >= 0")
    out = _scipy_i0(x)
    return float(out) if out.ndim == 0 else out


def log_bessel_i0(x):
    """log I0(x), stable for large x (uses the exponentially scaled form)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("log_bessel_i0 requires x >= 0")
    out = np.log(_scipy_i0e(x)) + x
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ProposalSpec:
    """Doubled-angle proposal, parameterized by a positive lower bound on
    the eigenvalues of P.  The per-coordinate von Mises concentration is
    a quarter of the bound."""

    lambda_min_bound: float
    p: int

    @property
    def concentration(self) -> float:
        return self.lambda_min_bound / 4.0

    @classmethod
    def from_params(
        cls, params: MvmParams, lambda_min: float | None = None
    ) -> "ProposalSpec":
        """Build a spec for ``params``; ``lambda_min`` may be any value in
        (0, min eigenvalue of P] and defaults to the computed smallest
        eigenvalue minus a 1e-12 slack."""
        eigenvalues = spectral.sym_eigen(params.p_matrix()).values
        smallest = float(eigenvalues[0])
        if smallest <= 0.0:
            raise NotPositiveDefiniteError(
                f"smallest eigenvalue of P is {smallest:.6g}; "
                "see modes.certify_unimodal"
            )
        bound = smallest - 1e-12 if lambda_min is None else float(lambda_min)
        if not 0.0 < bound <= smallest:
            raise ValueError(
                f"lambda_min bound must lie in (0, {smallest:.6g}], got {bound:.6g}"
            )
        return cls(lambda_min_bound=bound, p=params.p)


@dataclass(frozen=True)
class SampleBatch:
    """Accepted draws (rows, wrapped to [0, 2*pi)) plus trial accounting.
    Rebuilding with the same parameters and seed reproduces the batch
    bit-for-bit."""

    draws: np.ndarray
    trials: int
    seed: int

    @property
    def n(self) -> int:
        return self.draws.shape[0]

    @property
    def empirical_acceptance(self) -> float:
        return self.n / self.trials

    def points(self) -> list[TorusPoint]:
        return [TorusPoint(row) for row in self.draws]


@dataclass(frozen=True)
class AcceptanceForecast:
    """Predicted acceptance rate: the high-concentration asymptote
    2**-p * sqrt(bound**p / |P|), and optionally the exact rate Z/C with
    Z from quadrature (p <= 4)."""

    asymptotic_rate: float
    exact_rate: float | None


# ---------------------------------------------------------------------------
# generators


def sample_vm1(kappa: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws from the univariate von Mises VM(0, kappa), wrapped
    to [0, 2*pi); kappa = 0 gives uniform angles."""
    if kappa < 0.0:
        raise ValueError("kappa must be >= 0")
    return wrap_angles(rng.vonmises(0.0, kappa, size=n))


def _raw_proposals(spec: ProposalSpec, p: int, m: int, rng: np.random.Generator):
    """m proposal rows in the mean-zero frame.  Stream order per call:
    von Mises block, coin block."""
    tilde = rng.vonmises(0.0, spec.concentration, size=(m, p))
    coins = rng.integers(0, 2, size=(m, p))
    return wrap_angles(0.5 * tilde + np.pi * coins)


def sample_proposal_batch(
    spec: ProposalSpec, p: int, m: int, rng: np.random.Generator
) -> np.ndarray:
    """m independent draws from the proposal density g, shape (m, p)."""
    return _raw_proposals(spec, p, m, rng)


def sample_proposal_g(spec: ProposalSpec, p: int, rng: np.random.Generator) -> TorusPoint:
    """One draw from the proposal density g."""
    return TorusPoint(_raw_proposals(spec, p, 1, rng)[0])


def log_proposal_density(spec: ProposalSpec, thetas) -> np.ndarray:
    """log g at points with shape (..., p) in the mean-zero frame."""
    thetas = np.asarray(thetas, dtype=float)
    conc = spec.concentration
    per_coord = conc * np.cos(2.0 * thetas) - (np.log(TWO_PI) + log_bessel_i0(conc))
    return np.sum(per_coord, axis=-1)


def log_envelope_constant(params: MvmParams, spec: ProposalSpec) -> float:
    """log C for the bound exp(f) <= C g."""
    b = spec.lambda_min_bound
    return float(
        -params.p * b / 4.0
        + np.sum(params.kappa)
        + params.p * (np.log(TWO_PI) + log_bessel_i0(b / 4.0))
    )


def _log_acceptance(params: MvmParams, spec: ProposalSpec, c, s) -> np.ndarray:
    quad = np.einsum("...i,ij,...j->...", s, params.lam, s)
    ssq = np.sum(s * s, axis=-1)
    return (c - 1.0) @ params.kappa + 0.5 * (quad + spec.lambda_min_bound * ssq)


def acceptance_probability(params: MvmParams, spec: ProposalSpec, theta) -> float:
    """Probability of accepting proposal ``theta``:
    exp(sum kappa_i (c_i - 1) + 0.5 s^T (Lambda + bound I) s), which is <= 1
    whenever the spec's bound really is a lower eigenvalue bound for P.
    """
    t = trig_cache(params, as_torus_point(theta))
    prob = float(np.exp(_log_acceptance(params, spec, t.c, t.s)))
    if prob > 1.0 + 1e-12:
        raise BoundViolationError(
            f"acceptance probability {prob} exceeds 1: lambda_min bound "
            f"{spec.lambda_min_bound} is not a valid lower bound for P"
        )
    return min(prob, 1.0)


# ---------------------------------------------------------------------------
# rejection sampler


def _sample_block(
    params: MvmParams,
    spec: ProposalSpec,
    quota: int,
    seed_seq: np.random.SeedSequence,
) -> tuple[np.ndarray, int]:
    """Run the rejection loop until ``quota`` draws are accepted."""
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    p = params.p
    out = np.empty((quota, p))
    got = 0
    trials = 0
    budget = int(quota * STALL_FACTOR)
    while got < quota:
        m = min(1 << 16, max(1024, 4 * (quota - got)))
        props = _raw_proposals(spec, p, m, rng)
        u = rng.random(m)
        log_acc = _log_acceptance(params, spec, np.cos(props), np.sin(props))
        if np.any(log_acc > 1e-12):
            raise BoundViolationError(
                "acceptance exponent positive: invalid lambda_min bound"
            )
        acc_idx = np.flatnonzero(u <= np.exp(log_acc))
        need = quota - got
        if len(acc_idx) <= need:
            out[got : got + len(acc_idx)] = props[acc_idx]
            got += len(acc_idx)
            trials += m
        else:
            # stop exactly at the proposal that filled the quota
            out[got:quota] = props[acc_idx[:need]]
            got = quota
            trials += int(acc_idx[need - 1]) + 1
        if trials > budget and got < quota:
            raise AcceptanceStallError(
                f"{trials} proposals produced only {got}/{quota} draws"
            )
    return out, trials


def sample_mvm(
    params: MvmParams,
    n: int,
    spec: ProposalSpec | None = None,
    seed: int = 0,
    workers: int = 1,
) -> SampleBatch:
    """n exact draws from MVM(mu, kappa, Lambda); requires positive
    definite P.

    Draws are produced in blocks of ``BLOCK_SIZE`` with per-block
    generators spawned from ``seed``; ``workers`` > 1 only parallelizes
    block execution and never changes the output.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if spec is None:
        spec = ProposalSpec.from_params(params)
    else:
        # revalidate against these params; a stale spec would break the bound
        smallest = float(spectral.sym_eigen(params.p_matrix()).values[0])
        if smallest <= 0.0:
            raise NotPositiveDefiniteError(
                f"smallest eigenvalue of P is {smallest:.6g}; "
                "see modes.certify_unimodal"
            )
        if not 0.0 < spec.lambda_min_bound <= smallest:
            raise ValueError(
                f"spec bound {spec.lambda_min_bound:.6g} is not in (0, {smallest:.6g}]"
            )

    quotas = [BLOCK_SIZE] * (n // BLOCK_SIZE)
    if n % BLOCK_SIZE:
        quotas.append(n % BLOCK_SIZE)
    seeds = np.random.SeedSequence(seed).spawn(len(quotas))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda args: _sample_block(params, spec, *args),
                    zip(quotas, seeds),
                )
            )
    else:
        results = [_sample_block(params, spec, q, s) for q, s in zip(quotas, seeds)]

    centered = np.vstack([r[0] for r in results])
    trials = int(sum(r[1] for r in results))
    draws = wrap_angles(centered + params.mu.angles)
    return SampleBatch(draws=draws, trials=trials, seed=seed)


def forecast_acceptance(
    params: MvmParams,
    spec: ProposalSpec | None = None,
    with_exact: bool = False,
    n_per_dim: int | None = None,
) -> AcceptanceForecast:
    """Predict the acceptance rate of :func:`sample_mvm`.

    The asymptotic rate is exact in the high-concentration limit; the
    exact rate integrates the density by quadrature and is available for
    p <= 4 only (None otherwise).
    """
    if spec is None:
        spec = ProposalSpec.from_params(params)
    p_matrix = params.p_matrix()
    eigenvalues = spectral.sym_eigen(p_matrix).values
    if eigenvalues[0] <= 0.0:
        raise NotPositiveDefiniteError(
            "P is not positive definite; see modes.certify_unimodal"
        )
    det = float(np.prod(eigenvalues))
    b = spec.lambda_min_bound
    asymptotic = float(2.0 ** (-params.p) * np.sqrt(b**params.p / det))
    exact = None
    if with_exact and params.p <= oracle.MAX_QUADRATURE_DIM:
        log_z = oracle.log_partition(params, n_per_dim)
        exact = float(np.exp(log_z - log_envelope_constant(params, spec)))
    return AcceptanceForecast(asymptotic_rate=asymptotic, exact_rate=exact)
