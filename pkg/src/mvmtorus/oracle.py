"""Ground-truth machinery: tensor-product quadrature for the partition
function and marginals, the high-concentration closed form, brute-force
density grids, and the kappa=0 cube analysis.

The torus integrands are smooth and periodic, so the equal-weight
trapezoid rule converges spectrally; it is also trivially deterministic
(fixed, lexicographic reduction order).  Quadrature cost is n**p, so these
helpers are restricted to p <= 4.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import spectral
from .model import MvmParams, TWO_PI, as_torus_point, exponent_many

__all__ = [
    "MAX_QUADRATURE_DIM",
    "QuadratureGrid",
    "CubeAnalysis",
    "CubeFace",
    "quadrature_grid",
    "default_n_per_dim",
    "log_partition",
    "high_concentration_log_partition",
    "marginal_density",
    "kappa_zero_analysis",
    "density_grid",
    "write_density_grid_csv",
    "write_cube_surface_csv",
]

#: quadrature above this dimension is refused (cost n**p)
MAX_QUADRATURE_DIM = 4
#: face order of the unwrapped-cross cube layout: top, then the middle ring,
#: then bottom
CUBE_FACE_ORDER = ("+3", "-2", "+1", "+2", "-1", "-3")


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform periodic grid: nodes 2*pi*k/n with weight 2*pi/n per node
    per dimension (total weight (2*pi)**p)."""

    n_per_dim: int
    nodes: np.ndarray
    weight: float


def quadrature_grid(n_per_dim: int) -> QuadratureGrid:
    n = int(n_per_dim)
    if n < 16:
        raise ValueError(f"n_per_dim must be >= 16, got {n}")
    nodes = TWO_PI * np.arange(n) / n
    return QuadratureGrid(n_per_dim=n, nodes=nodes, weight=TWO_PI / n)


def default_n_per_dim(p: int) -> int:
    return 128 if p <= 3 else 48


def _check_quadrature_dim(p: int) -> None:
    if p > MAX_QUADRATURE_DIM:
        raise ValueError(
            f"quadrature supports p <= {MAX_QUADRATURE_DIM}, got p={p}"
        )


def _exponent_on_grid(params: MvmParams, grid: QuadratureGrid) -> np.ndarray:
    """Exponent on the full tensor grid, shape (n,)*p, built by axis
    broadcasting instead of materializing the point list."""
    p = params.p
    total = np.zeros((1,) * p)
    sines = []
    for i in range(p):
        shape = [1] * p
        shape[i] = grid.n_per_dim
        d = grid.nodes - params.mu.angles[i]
        total = total + (params.kappa[i] * np.cos(d)).reshape(shape)
        sines.append(np.sin(d).reshape(shape))
    for i in range(p):
        for j in range(i + 1, p):
            total = total + params.lam[i, j] * (sines[i] * sines[j])
    return total


def log_partition(params: MvmParams, n_per_dim: int | None = None) -> float:
    """Log of the trapezoid-rule integral of exp(exponent) over the torus."""
    _check_quadrature_dim(params.p)
    grid = quadrature_grid(n_per_dim or default_n_per_dim(params.p))
    values = _exponent_on_grid(params, grid)
    return float(logsumexp(values.ravel()) + params.p * np.log(grid.weight))


def high_concentration_log_partition(params: MvmParams) -> float:
    """Laplace-type closed form (p/2) log(2*pi) - 0.5 log|P| + sum(kappa),
    valid when P = diag(kappa) - Lambda is positive definite."""
    p_matrix = params.p_matrix()
    if not spectral.is_positive_definite(p_matrix):
        raise ValueError("high-concentration approximation requires positive definite P")
    det = spectral.determinant(p_matrix)
    return float(
        0.5 * params.p * np.log(TWO_PI) - 0.5 * np.log(det) + np.sum(params.kappa)
    )


def marginal_density(
    params: MvmParams, dim: int, theta_i, n_per_dim: int | None = None
):
    """Marginal density of coordinate ``dim`` at angle(s) ``theta_i``,
    by quadrature over the other p-1 coordinates, normalized by
    :func:`log_partition` at the same resolution."""
    p = params.p
    _check_quadrature_dim(p)
    if not 0 <= dim < p:
        raise ValueError(f"dim must be in [0, {p}), got {dim}")
    n = n_per_dim or default_n_per_dim(p)
    log_z = log_partition(params, n)
    grid = quadrature_grid(n)

    free = [i for i in range(p) if i != dim]
    q = len(free)
    sines = []
    base = np.zeros((1,) * q) if q else np.zeros(())
    for axis, i in enumerate(free):
        shape = [1] * q
        shape[axis] = n
        d = grid.nodes - params.mu.angles[i]
        base = base + (params.kappa[i] * np.cos(d)).reshape(shape)
        sines.append(np.sin(d).reshape(shape))
    for a in range(q):
        for b in range(a + 1, q):
            base = base + params.lam[free[a], free[b]] * (sines[a] * sines[b])

    theta_arr = np.atleast_1d(np.asarray(theta_i, dtype=float))
    out = np.empty(theta_arr.shape)
    for k, angle in enumerate(theta_arr.ravel()):
        d = angle - params.mu.angles[dim]
        fixed = params.kappa[dim] * np.cos(d)
        total = base + fixed
        s_fixed = np.sin(d)
        for axis, i in enumerate(free):
            total = total + params.lam[dim, i] * s_fixed * sines[axis]
        log_marg = logsumexp(np.asarray(total).ravel()) + q * np.log(grid.weight)
        out.ravel()[k] = np.exp(log_marg - log_z)
    return float(out[0]) if np.isscalar(theta_i) or np.ndim(theta_i) == 0 else out


# ---------------------------------------------------------------------------
# kappa = 0 cube analysis


@dataclass(frozen=True)
class CubeFace:
    """One face of the cube [-1, 1]^p (p=3 only), sampled on a grid_n x
    grid_n lattice.  ``s`` holds the 3-vectors, ``values`` the quadratic
    form 0.5 * s^T Lambda s."""

    label: str
    s: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class CubeAnalysis:
    """Vertex table and witnesses for the kappa=0 regime, where every
    global maximum of the density lives on the surface of the sine cube."""

    vertex_values: dict[tuple[int, ...], float]
    best_vertices: list[tuple[int, ...]]
    top_eigenpair: tuple[float, np.ndarray]
    surface_grid: list[CubeFace] | None


def _quadratic_form(lam: np.ndarray, s: np.ndarray) -> np.ndarray:
    return 0.5 * np.einsum("...i,ij,...j->...", s, lam, s)


def kappa_zero_analysis(lam, grid_n: int = 0) -> CubeAnalysis:
    """Evaluate g(s) = 0.5 s^T Lambda s on all sign vertices of [-1,1]^p,
    report the argmax set (ties within 1e-12 relative), and the largest
    eigenpair of Lambda (whose eigenvector witnesses max f > 0 whenever
    Lambda != 0).  With ``grid_n`` > 0 and p = 3, also sample g on the six
    cube faces in the unwrapped-cross order ``CUBE_FACE_ORDER``.
    """
    lam = np.asarray(lam, dtype=float)
    p = lam.shape[0]
    # reuse the parameter validation (symmetry, zero diagonal)
    MvmParams(mu=np.zeros(p), kappa=np.zeros(p), lam=lam)

    vertices = np.array(list(itertools.product((-1, 1), repeat=p)), dtype=float)
    values = _quadratic_form(lam, vertices)
    vertex_values = {
        tuple(int(x) for x in v): float(g) for v, g in zip(vertices, values)
    }
    top = float(np.max(values))
    tie = 1e-12 * max(1.0, abs(top))
    best = [v for v, g in vertex_values.items() if g >= top - tie]

    eig = spectral.sym_eigen(lam)
    top_eigenpair = (float(eig.values[-1]), eig.vectors[:, -1])

    surface = None
    if grid_n > 0:
        if p != 3:
            raise ValueError("surface grids are only defined for p=3 cubes")
        surface = []
        u = np.linspace(-1.0, 1.0, grid_n)
        uu, vv = np.meshgrid(u, u, indexing="ij")
        for label in CUBE_FACE_ORDER:
            sign = 1.0 if label[0] == "+" else -1.0
            axis = int(label[1]) - 1
            s = np.empty((grid_n, grid_n, 3))
            others = [i for i in range(3) if i != axis]
            s[..., axis] = sign
            s[..., others[0]] = uu
            s[..., others[1]] = vv
            surface.append(
                CubeFace(label=label, s=s, values=_quadratic_form(lam, s))
            )
    return CubeAnalysis(
        vertex_values=vertex_values,
        best_vertices=best,
        top_eigenpair=top_eigenpair,
        surface_grid=surface,
    )


# ---------------------------------------------------------------------------
# grids and CSV emission


def density_grid(params: MvmParams, dims, n: int, slice_point=None) -> np.ndarray:
    """Exponent values over an n-point grid in one or two coordinates,
    the remaining coordinates held at ``slice_point`` (default: mu).

    ``dims`` is a pair of coordinate indices for an n x n grid, or a single
    index (or a repeated pair) for a 1-d sweep.
    """
    dims = (dims,) if np.isscalar(dims) else tuple(dims)
    if len(dims) == 2 and dims[0] == dims[1]:
        dims = (dims[0],)
    if len(dims) not in (1, 2):
        raise ValueError("dims must name one or two coordinates")
    for d in dims:
        if not 0 <= d < params.p:
            raise ValueError(f"coordinate index {d} out of range for p={params.p}")
    slice_point = params.mu if slice_point is None else as_torus_point(slice_point)
    if slice_point.p != params.p:
        raise ValueError("slice point dimension mismatch")

    nodes = TWO_PI * np.arange(n) / n
    if len(dims) == 1:
        thetas = np.tile(slice_point.angles, (n, 1))
        thetas[:, dims[0]] = nodes
        return exponent_many(params, thetas)
    ti, tj = np.meshgrid(nodes, nodes, indexing="ij")
    thetas = np.tile(slice_point.angles, (n, n, 1))
    thetas[..., dims[0]] = ti
    thetas[..., dims[1]] = tj
    return exponent_many(params, thetas)


def _fmt(x) -> str:
    # shortest decimal that round-trips the IEEE-754 double
    return repr(float(x))


def write_density_grid_csv(
    fileobj, params: MvmParams, dims, n: int, slice_point=None
) -> None:
    """Tidy CSV of :func:`density_grid`: node indices, angles, exponent."""
    dims = (dims,) if np.isscalar(dims) else tuple(dims)
    values = density_grid(params, dims, n, slice_point)
    nodes = TWO_PI * np.arange(n) / n
    writer = csv.writer(fileobj, lineterminator="\n")
    if values.ndim == 1:
        d = dims[0]
        writer.writerow(["i", f"theta{d + 1}", "value"])
        for i in range(n):
            writer.writerow([i, _fmt(nodes[i]), _fmt(values[i])])
        return
    di, dj = dims[0], dims[1]
    writer.writerow(["i", "j", f"theta{di + 1}", f"theta{dj + 1}", "value"])
    for i in range(n):
        for j in range(n):
            writer.writerow([i, j, _fmt(nodes[i]), _fmt(nodes[j]), _fmt(values[i, j])])


def write_cube_surface_csv(fileobj, analysis: CubeAnalysis) -> None:
    """CSV with the vertex table followed by any per-face surface grids.

    Columns: record ('vertex' or 'face'), face label, grid row/col (empty
    for vertices), the s vector, and g(s).
    """
    some_vertex = next(iter(analysis.vertex_values))
    p = len(some_vertex)
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(
        ["record", "face", "row", "col"]
        + [f"s{i + 1}" for i in range(p)]
        + ["value"]
    )
    for vertex in sorted(analysis.vertex_values):
        writer.writerow(
            ["vertex", "", "", ""]
            + [str(x) for x in vertex]
            + [_fmt(analysis.vertex_values[vertex])]
        )
    for face in analysis.surface_grid or []:
        n = face.values.shape[0]
        for i in range(n):
            for j in range(n):
                writer.writerow(
                    ["face", face.label, i, j]
                    + [_fmt(x) for x in face.s[i, j]]
                    + [_fmt(face.values[i, j])]
                )
