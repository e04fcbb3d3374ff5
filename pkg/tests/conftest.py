"""Shared fixtures: reference matrices, the six-mode benchmark family, and
small independent oracles (power-series Bessel functions, cofactor
determinants) used to cross-check the library paths."""

from __future__ import annotations

import numpy as np
import pytest

from mvmtorus import MvmParams

# Lambda whose eigenvalues are {-4, 2, 2}; with kappa = 3*1 the matrix
# P = diag(kappa) - Lambda is positive definite (eigenvalues {1, 1, 7})
# even though the row-dominance margin fails (3 < 4).
REFERENCE_COUPLING = np.array(
    [
        [0.0, -2.0, 2.0],
        [-2.0, 0.0, 2.0],
        [2.0, 2.0, 0.0],
    ]
)

# kappa = 0 coupling with exactly two antipodal modes at s = +-(1, 1, 1).
TWO_MODE_COUPLING = np.array(
    [
        [0.0, 1.75, 0.77],
        [1.75, 0.0, 0.06],
        [0.77, 0.06, 0.0],
    ]
)

# kappa = 0 coupling whose maximum is a closed flat ridge along cube edges
# ("zig-zag belt"); perturbing with kappa = sin(eta)*1 breaks the ridge
# into six isolated maxima.
RING_COUPLING = np.array(
    [
        [0.0, -1.0, 1.0],
        [-1.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
    ]
)


def six_mode_params(eta: float, mu=None) -> MvmParams:
    mu = np.zeros(3) if mu is None else np.asarray(mu)
    return MvmParams(mu=mu, kappa=np.full(3, np.sin(eta)), lam=RING_COUPLING)


def six_mode_table(eta: float):
    """The six analytic maxima of the perturbed ring family and their
    Hessians, as (theta, hessian) pairs."""
    e = np.sin(eta)
    half = 0.5 * np.pi
    thetas = [
        (0.0, 3 * half + eta, 3 * half + eta),
        (half - eta, 3 * half + eta, 0.0),
        (half - eta, 0.0, half - eta),
        (0.0, half - eta, half - eta),
        (3 * half + eta, half - eta, 0.0),
        (3 * half + eta, 0.0, 3 * half + eta),
    ]
    h14 = np.array([[-e, -e, e], [-e, -1.0, e * e], [e, e * e, -1.0]])
    h25 = np.array([[-1.0, -e * e, e], [-e * e, -1.0, e], [e, e, -e]])
    h36 = np.array([[-1.0, -e, e * e], [-e, -e, e], [e * e, e, -1.0]])
    hessians = [h14, h25, h36, h14, h25, h36]
    return [(np.array(t), h) for t, h in zip(thetas, hessians)]


def bessel_i0_series(x: float, terms: int = 30) -> float:
    """Power series sum_k (x/2)^(2k) / (k!)^2, independent of scipy."""
    total = 0.0
    term = 1.0
    for k in range(terms):
        if k > 0:
            term *= (x / 2.0) ** 2 / (k * k)
        total += term
    return total


def bessel_i1_series(x: float, terms: int = 30) -> float:
    """Power series (x/2) * sum_k (x/2)^(2k) / (k! (k+1)!)."""
    total = 0.0
    term = 1.0
    for k in range(terms):
        if k > 0:
            term *= (x / 2.0) ** 2 / (k * (k + 1))
        total += term
    return (x / 2.0) * total


def cofactor_determinant(a: np.ndarray) -> float:
    """Recursive cofactor expansion along the first row."""
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += (-1.0) ** j * a[0, j] * cofactor_determinant(minor)
    return total


def random_symmetric_coupling(rng: np.random.Generator, p: int, scale: float = 2.0):
    lam = rng.uniform(-scale, scale, size=(p, p))
    lam = np.triu(lam, k=1)
    return lam + lam.T


def random_params(
    rng: np.random.Generator,
    p: int,
    kappa_range=(0.0, 5.0),
    coupling_scale: float = 2.0,
) -> MvmParams:
    return MvmParams(
        mu=rng.uniform(0.0, 2.0 * np.pi, size=p),
        kappa=rng.uniform(*kappa_range, size=p),
        lam=random_symmetric_coupling(rng, p, coupling_scale),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
