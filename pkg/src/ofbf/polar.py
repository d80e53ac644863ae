"""Polar coordinates adapted to a matrix exponent E: x = tau(x)**E @ l(x).

The radial norm is ``norm0(x) = int_0^1 |t**E x| dt / t`` with the Euclidean
base norm. After substituting ``t = exp(-s)`` it becomes
``int_0^inf |exp(-s E) x| ds``, an integral of a smooth, exponentially decaying
function, evaluated with composite Gauss-Legendre panels.
"""

import math

import numpy as np

from .errors import InvalidInput, NumericalFailure, ZeroVector
from .matlin import expm, mat_pow, real_matrix

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


class PolarSystem:
    """Polar decomposition ``x = tau**E @ l`` with ``norm0(l) = 1``."""

    def __init__(self, E, panels=4):
        E = real_matrix(E)
        if E.shape[0] not in (1, 2):
            raise InvalidInput("polar coordinates are implemented for m = 1 or 2")
        eig = np.linalg.eigvals(E)
        if np.min(eig.real) <= 0:
            raise InvalidInput("E must have eigenvalues with positive real parts")
        self.E = E
        self.m = E.shape[0]
        self.panels = int(panels)
        lam = np.diag(E).mean()
        self.eta = float(lam) if np.allclose(E, lam * np.eye(self.m), rtol=0, atol=1e-14 * abs(lam)) else None
        self._lam_min = float(np.min(eig.real))
        self._nodes, self._weights = self._rule(self.panels)
        self._diag = None
        if self.eta is None and np.all(np.abs(eig.imag) == 0):
            w, V = np.linalg.eig(E)
            if np.linalg.cond(V) < 1e8:
                self._diag = (w.real, V.real, np.linalg.inv(V.real))

    def _rule(self, panels):
        s_max = 45.0 / self._lam_min
        edges = np.linspace(0.0, s_max, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        return nodes, weights

    def _flow(self, x, s):
        """Rows ``exp(-s_k E) x`` for all nodes ``s_k``."""
        if self._diag is not None:
            w, V, Vinv = self._diag
            y = Vinv @ x
            return (np.exp(-np.outer(s, w)) * y[None, :]) @ V.T
        return np.array([expm(-sk * self.E) @ x for sk in s])

    def norm0(self, x, refine=False):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.m,):
            raise InvalidInput(f"expected a vector of length {self.m}")
        nx = np.linalg.norm(x)
        if nx == 0:
            raise ZeroVector("norm0 is undefined at the origin")
        if self.eta is not None:
            return nx / self.eta
        nodes, weights = self._rule(2 * self.panels) if refine else (self._nodes, self._weights)
        vals = np.linalg.norm(self._flow(x, nodes), axis=1)
        return float(weights @ vals)

    def polar_decompose(self, x):
        """Return ``(tau, l)`` with ``x = mat_pow(E, tau) @ l`` and ``norm0(l) = 1``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        nx = np.linalg.norm(x)
        if nx == 0:
            raise ZeroVector("polar decomposition is undefined at the origin")
        if self.eta is not None:
            tau = (nx / self.eta) ** (1.0 / self.eta)
            return tau, x / tau**self.eta
        # g(u) = norm0(exp(-u E) x) is strictly decreasing in u = log c.
        g = lambda u: self.norm0(expm(-u * self.E) @ x) - 1.0
        lo, hi = math.log(1e-8), math.log(1e8)
        glo, ghi = g(lo), g(hi)
        if not (glo > 0 > ghi):
            raise NumericalFailure("radial bracket [1e-8, 1e8] does not contain tau")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if g(mid) > 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(1.0, abs(lo)):
                break
        tau = math.exp(0.5 * (lo + hi))
        return tau, mat_pow(-self.E, tau) @ x

    def tau(self, x):
        return self.polar_decompose(x)[0]

    def direction(self, x):
        return self.polar_decompose(x)[1]

    def sphere_point(self, u):
        """Point of the unit sphere of ``norm0`` on the ray through ``u``."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return u / self.norm0(u)

    def compose(self, r, theta):
        """The map ``(r, theta) -> r**E @ theta``."""
        return mat_pow(self.E, r) @ np.asarray(theta, dtype=float)


def norm0(system, x):
    return system.norm0(x)


def polar_decompose(system, x):
    return system.polar_decompose(x)
