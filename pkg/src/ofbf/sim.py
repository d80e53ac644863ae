"""Exact Gaussian simulation on finite grids by factorizing the block covariance."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import os

import numpy as np

from .errors import GridNotInvariant, InvalidInput, NotPSD
from .groups import GroupElement2
from .spectral import covariance

JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)
Z_THRESHOLD = 4.0


def worker_count(threads=None):
    if threads is None:
        threads = os.environ.get("OFBF_THREADS", "1")
    try:
        return max(1, int(threads))
    except ValueError:
        raise InvalidInput(f"OFBF_THREADS must be an integer, got {threads!r}") from None


@dataclass(frozen=True, eq=False)
class GridDesign:
    """Distinct evaluation points; point ``i`` owns rows ``i*n .. (i+1)*n - 1`` of the covariance."""

    points: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        if P.ndim != 2 or len(P) == 0:
            raise InvalidInput("a grid needs at least one point")
        if not np.all(np.isfinite(P)):
            raise InvalidInput("grid points must be finite")
        for i in range(len(P)):
            if np.any(np.all(np.abs(P[i + 1 :] - P[i]) <= 1e-12, axis=1)):
                raise InvalidInput(f"grid point {P[i]} appears twice")
        object.__setattr__(self, "points", P)

    def __len__(self):
        return len(self.points)

    @property
    def m(self):
        return self.points.shape[1]

    def block(self, i, n):
        return slice(i * n, (i + 1) * n)

    def permutation(self, A, tol=1e-9):
        """Index map ``perm`` with ``A p_i = p_perm[i]``; raises if the grid is not closed under ``A``."""
        A = np.asarray(A, dtype=float)
        image = self.points @ A.T
        perm = []
        for q in image:
            hit = np.flatnonzero(np.max(np.abs(self.points - q), axis=1) <= tol * max(1.0, np.max(np.abs(q))))
            if len(hit) != 1:
                raise GridNotInvariant(f"the image {q} of a grid point is not on the grid")
            perm.append(int(hit[0]))
        return np.array(perm)


def polygon_grid(radii, count, offset=0.0):
    """Points at the given radii and ``count`` equally spaced angles (turns ``offset + k/count``)."""
    ang = 2 * np.pi * (offset + np.arange(count) / count)
    pts = [r * np.array([np.cos(a), np.sin(a)]) for r in radii for a in ang]
    return GridDesign(np.array(pts))


def block_covariance(spec, grid, cfg=None, threads=None):
    if grid.m != spec.m:
        raise InvalidInput(f"grid points live in R^{grid.m}, the field in R^{spec.m}")
    N, n = len(grid), spec.n
    C = np.zeros((N * n, N * n))
    jobs = [(i, j) for i in range(N) for j in range(i, N)]
    cov = lambda ij: covariance(spec, grid.points[ij[0]], grid.points[ij[1]], cfg)
    workers = worker_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            blocks = list(ex.map(cov, jobs))
    else:
        blocks = [cov(ij) for ij in jobs]
    for (i, j), G in zip(jobs, blocks):
        C[grid.block(i, n), grid.block(j, n)] = G
        C[grid.block(j, n), grid.block(i, n)] = G.T
    return 0.5 * (C + C.T)


@dataclass(eq=False)
class SamplerState:
    grid: GridDesign
    n: int
    covariance: np.ndarray
    factor: np.ndarray
    jitter: float
    seed: int = 0
    counter: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.covariance.shape[0]


def build_sampler(spec, grid, cfg=None, seed=0, threads=None):
    """Covariance factor for ``spec`` on ``grid``.

    Points at the origin give zero rows and are left out of the Cholesky step.
    Jitter escalates through ``JITTER_LADDER`` (relative to trace/dim).
    """
    if not isinstance(grid, GridDesign):
        grid = GridDesign(grid)
    C = block_covariance(spec, grid, cfg, threads)
    n = spec.n
    keep = np.concatenate([np.arange(i * n, (i + 1) * n) for i in range(len(grid)) if np.any(grid.points[i])] or [[]]).astype(int)
    L = np.zeros_like(C)
    used = 0.0
    if len(keep):
        sub = C[np.ix_(keep, keep)]
        scale = np.trace(sub) / len(keep)
        for level in JITTER_LADDER:
            try:
                Ls = np.linalg.cholesky(sub + level * scale * np.eye(len(keep)))
            except np.linalg.LinAlgError:
                continue
            used = level * scale
            break
        else:
            lam = float(np.linalg.eigvalsh(sub)[0])
            raise NotPSD(f"block covariance is not positive semidefinite (min eigenvalue {lam:.3e})", lam)
        L[np.ix_(keep, keep)] = Ls
    meta = {"jitter": used, "jitter_ladder": list(JITTER_LADDER), "dims": [len(grid), n]}
    return SamplerState(grid, n, C, L, used, int(seed), 0, meta)


def _one(state, i):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([state.seed, i])))
    return state.factor @ rng.standard_normal(state.dim)


def sample(state, count, start=None, threads=None):
    """``count`` realizations shaped ``(count, points, n)``.

    Realization ``i`` draws from its own stream seeded by ``(seed, i)``, so the
    output does not depend on the worker count. ``start`` defaults to the
    state's counter, which advances by ``count``.
    """
    if count < 0:
        raise InvalidInput("count must be nonnegative")
    first = state.counter if start is None else int(start)
    idx = range(first, first + count)
    workers = worker_count(threads)
    if workers > 1 and count > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(lambda i: _one(state, i), idx))
    else:
        rows = [_one(state, i) for i in idx]
    if start is None:
        state.counter += count
    out = np.array(rows).reshape(count, len(state.grid), state.n)
    return out


def empirical_covariance(samples):
    """Mean-zero sample covariance of flattened realizations and its entrywise standard error."""
    X = np.asarray(samples, dtype=float).reshape(len(samples), -1)
    N = len(X)
    if N < 2:
        raise InvalidInput("need at least two realizations")
    prods = X[:, :, None] * X[:, None, :]
    C = prods.mean(axis=0)
    se = prods.std(axis=0, ddof=1) / np.sqrt(N)
    return C, se


def coverage(C_hat, se, C_true, k=3.0):
    """Fraction of entries with ``|C_hat - C_true| <= k * se``."""
    return float(np.mean(np.abs(C_hat - C_true) <= k * se + 1e-300))


@dataclass(frozen=True)
class SymmetryTestResult:
    passed: bool
    statistic: float
    threshold: float = Z_THRESHOLD


def _as_matrix(g):
    return g.matrix() if isinstance(g, GroupElement2) else np.atleast_2d(np.asarray(g, dtype=float))


def empirical_symmetry_test(spec, element, mode, grid, samples=2000, seed=0, cfg=None, state=None):
    """Monte-Carlo test of ``X(A t) = X(t)`` (domain mode) or ``B X(t) = X(t)`` (range mode) in law.

    For every realization the products of the transformed field are compared with
    those of the raw field; the statistic is the largest |t|-score of the mean
    difference.
    """
    M = _as_matrix(element)
    if not isinstance(grid, GridDesign):
        grid = GridDesign(grid)
    if mode == "domain":
        perm = grid.permutation(M)
    elif mode != "range":
        raise InvalidInput("mode must be 'domain' or 'range'")
    state = state or build_sampler(spec, grid, cfg, seed)
    X = sample(state, samples, start=0)
    Y = X[:, perm, :] if mode == "domain" else X @ M.T
    X, Y = X.reshape(samples, -1), Y.reshape(samples, -1)
    d = Y[:, :, None] * Y[:, None, :] - X[:, :, None] * X[:, None, :]
    mean = d.mean(axis=0)
    sd = d.std(axis=0, ddof=1)
    scale = max(float(np.max(sd)), 1e-300)
    z = np.where(sd > 1e-12 * scale, np.abs(mean) / np.where(sd > 0, sd, 1.0) * np.sqrt(samples), 0.0)
    stat = float(np.max(z))
    return SymmetryTestResult(stat <= Z_THRESHOLD, stat)
