"""Spectral descriptions of operator fractional Brownian fields and their covariance.

The spectral measure factors in polar form as
``F(dx) = r**-H Delta(dθ) r**-H.T dr / r`` with ``x = r**(E.T) θ``, and

    Γ(t1, t2) = ∫_0^∞ ∫ (exp(i<t1, x>) - 1)(exp(-i<t2, x>) - 1) r**-H Delta(dθ) r**-H.T dr/r.

For a scalar exponent ``E = eta I`` the substitution ``s = r**eta`` turns the
radial integral into ``(1/eta) ∫_0^∞ (e^{ias} - 1)(e^{-ibs} - 1) s**-H' V s**-H'.T ds/s``
with ``H' = H/eta``. In an eigenbasis of ``H'`` every entry is a scalar
integral ``I(a, b, alpha)`` with ``alpha = lam_j + lam_k``; :func:`radial_mellin`
evaluates it in closed form and :func:`radial_quadrature` by quadrature.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np
import scipy.integrate
from scipy.special import gamma as gamma_fn

from . import groups as grp
from .errors import (
    DegenerateSpec,
    InvalidInput,
    NumericalFailure,
    QuadratureFailure,
    SingularPoint,
    UnsupportedSpec,
)
from .matlin import expm, hermitian, mat_pow, real_matrix
from .measures import AtomicMeasure, ConstantMeasure, PiecewiseMeasure, unit, validate


@dataclass(frozen=True, eq=False)
class ScalingPair:
    """Exponents ``(E, H)`` with ``0 < Re eig(H) < min Re eig(E.T)``."""

    E: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        E, H = real_matrix(self.E), real_matrix(self.H)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "H", H)
        he = np.linalg.eigvals(H).real
        ee = np.linalg.eigvals(E.T).real
        if not (0 < he.min() <= he.max() < ee.min()):
            raise InvalidInput(
                f"need 0 < Re eig(H) < min Re eig(E*), got eig(H)={np.round(he, 6)}, eig(E)={np.round(ee, 6)}"
            )

    @property
    def m(self):
        return self.E.shape[0]

    @property
    def n(self):
        return self.H.shape[0]

    @property
    def H_E(self):
        return self.H + np.trace(self.E) / 2 * np.eye(self.n)

    @property
    def is_normalized(self):
        return abs(np.linalg.eigvals(self.E.T).real.min() - 1) <= 1e-12

    def normalized(self):
        """Equivalent pair with ``min Re eig(E*) = 1`` and the scale factor used."""
        a = float(np.linalg.eigvals(self.E.T).real.min())
        return ScalingPair(self.E / a, self.H / a), a


@dataclass(frozen=True)
class QuadratureConfig:
    """Numerical settings for covariance evaluation.

    ``radial`` picks the closed-form radial integral (``"analytic"``) or the
    quadrature route (``"quadrature"``), whose log-radius panels have density
    ``radial_panels / (u_max - u_min)`` per unit and which replaces the integrand
    below ``exp(u_min)`` by its leading Taylor term. ``angular_nodes`` sets the
    tanh-sinh rule used on every kink-free piece of an arc.
    """

    u_min: float = -18.0
    u_max: float = 18.0
    radial_panels: int = 800
    radial_order: int = 8
    angular_nodes: int = 32
    rel_tol: float = 1e-6
    radial: str = "analytic"
    max_doublings: int = 4

    def __post_init__(self):
        if not self.u_min < self.u_max:
            raise InvalidInput("u_min must be below u_max")
        if min(self.radial_panels, self.radial_order, self.angular_nodes) < 1:
            raise InvalidInput("node counts must be positive")
        if self.radial not in ("analytic", "quadrature"):
            raise InvalidInput("radial must be 'analytic' or 'quadrature'")

    def to_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True, eq=False)
class OfbfSpec:
    scaling: ScalingPair
    spherical: object
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.spherical.m != self.scaling.m:
            raise InvalidInput(f"measure lives in dimension {self.spherical.m}, E in {self.scaling.m}")
        if self.spherical.n != self.scaling.n:
            raise InvalidInput(f"measure values are {self.spherical.n}x{self.spherical.n}, H is {self.scaling.n}x{self.scaling.n}")
        rep = validate(self.spherical)
        if not rep.ok:
            raise DegenerateSpec("invalid spherical measure: " + "; ".join(rep.problems))

    @property
    def m(self):
        return self.scaling.m

    @property
    def n(self):
        return self.scaling.n

    @property
    def E(self):
        return self.scaling.E

    @property
    def H(self):
        return self.scaling.H


def make_spec(E, H, spherical):
    return OfbfSpec(ScalingPair(np.atleast_2d(E), np.atleast_2d(H)), spherical)


def fbm_spec(h, weight=1.0):
    """One-dimensional fractional Brownian motion: atoms of mass ``weight`` at ±1."""
    meas = AtomicMeasure(((0, np.array([[weight]])), (0.5, np.array([[weight]]))), m=1)
    return make_spec([[1.0]], [[h]], meas)


# ---------------------------------------------------------------- scalar radial integrals


def _sign(c):
    return np.sign(c)


def radial_mellin(a, b, alpha):
    """Closed form of ``∫_0^∞ (e^{ias} - 1)(e^{-ibs} - 1) s^(-alpha) ds/s``.

    Valid for ``0 < Re alpha < 2``. Uses
    ``Γ(-α)[(-i(a-b))^α - (-ia)^α - (ib)^α]`` rewritten so that the removable
    singularity at ``alpha = 1`` causes no cancellation. Broadcasts ``a``, ``b``
    of shape (D,) against ``alpha`` of shape (K,) to a (D, K) result.
    """
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    alpha = np.asarray(alpha, dtype=complex)
    eps = alpha - 1.0
    total = np.zeros(np.broadcast_shapes(a.shape, alpha.shape), dtype=complex)
    for c, sigma in ((a - b, 1.0), (a, -1.0), (-b, -1.0)):
        nz = c != 0
        cc = np.where(nz, c, 1.0)
        L = np.log(np.abs(cc)) - 0.5j * np.pi * _sign(cc)
        z = eps * L
        small = np.abs(z) < 1e-6
        zs = np.where(small, 1.0, z)
        e1 = np.where(small, 1 + z / 2 + z * z / 6 + z**3 / 24, np.expm1(zs) / zs)
        total += np.where(nz, sigma * (-1j * cc) * L * e1, 0.0)
    return gamma_fn(2.0 - alpha) / alpha * total


@lru_cache(maxsize=64)
def _gl(order):
    return np.polynomial.legendre.leggauss(order)


def _panel_rule(lo, hi, npanels, order):
    x, w = _gl(order)
    edges = np.linspace(lo, hi, npanels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _osc_tail(x0, alpha, omega, density, order):
    """``∫_{x0}^∞ exp(i omega x) x^(-alpha-1) dx`` for ``0 < x0``, ``omega = ±1``."""
    total = 0.0j
    if x0 < 1:
        span = -math.log(x0)
        u, w = _panel_rule(math.log(x0), 0.0, max(1, math.ceil(span * density)), order)
        x = np.exp(u)
        total += np.sum(w * np.exp(1j * omega * x) * x ** (-alpha))
    X = 64 * math.pi
    lo = max(x0, 1.0)
    if lo < X:
        x, w = _panel_rule(lo, X, max(1, math.ceil((X - lo) / (math.pi / 4))), order)
        total += np.sum(w * np.exp(1j * omega * x) * x ** (-alpha - 1))
    else:
        X = lo
    # Asymptotic expansion of the remaining tail, from repeated integration by parts.
    term, acc, poch = 0.0j, 0.0j, 1.0 + 0j
    for k in range(12):
        deriv = (-1) ** k * poch * X ** (-alpha - 1 - k)
        term = (1j / omega) ** (k + 1) * deriv
        acc += term
        poch *= alpha + 1 + k
    return total + np.exp(1j * omega * X) * acc


def radial_quadrature(a, b, alpha, cfg=None):
    """Quadrature evaluation of the same integral as :func:`radial_mellin` (scalar inputs)."""
    cfg = cfg or QuadratureConfig(radial="quadrature")
    a, b, alpha = float(a), float(b), complex(alpha)
    cmax = max(abs(a), abs(b), abs(a - b))
    if cmax == 0:
        return 0j
    density = cfg.radial_panels / (cfg.u_max - cfg.u_min)
    sc = 1.0 / cmax
    s_lo = sc * math.exp(cfg.u_min)
    total = a * b * s_lo ** (2 - alpha) / (2 - alpha)
    u, w = _panel_rule(cfg.u_min, 0.0, max(1, math.ceil(-cfg.u_min * density)), cfg.radial_order)
    s = sc * np.exp(u)
    total += np.sum(w * np.expm1(1j * a * s) * np.expm1(-1j * b * s) * s ** (-alpha))
    # On [sc, ∞) split the kernel into 1 and three pure exponentials.
    total += sc ** (-alpha) / alpha
    for c, sigma in ((a - b, 1.0), (a, -1.0), (-b, -1.0)):
        if c == 0:
            total += sigma * sc ** (-alpha) / alpha
            continue
        tail = _osc_tail(abs(c) * sc, alpha, math.copysign(1.0, c), density, cfg.radial_order)
        total += sigma * abs(c) ** alpha * tail
    return total


# ---------------------------------------------------------------- angular rules


@lru_cache(maxsize=32)
def _tanh_sinh(K):
    h = 3.5 / K
    t = h * np.arange(-K, K + 1)
    sh = 0.5 * np.pi * np.sinh(t)
    x = np.tanh(sh)
    w = h * 0.5 * np.pi * np.cosh(t) / np.cosh(sh) ** 2
    return x, w


def _kinks(vectors):
    out = []
    for v in vectors:
        if np.linalg.norm(v) > 0:
            phi = math.atan2(v[1], v[0]) / (2 * math.pi)
            out += [(phi + 0.25) % 1.0, (phi + 0.75) % 1.0]
    return out


def _split(start, end, kinks):
    cuts = []
    for k in kinks:
        for shift in (-1, 0, 1, 2):
            p = k + shift
            if start + 1e-15 < p < end - 1e-15:
                cuts.append(p)
    pts = [start] + sorted(cuts) + [end]
    return [(pts[i], pts[i + 1]) for i in range(len(pts) - 1) if pts[i + 1] > pts[i]]


# ---------------------------------------------------------------- covariance


class _Engine:
    """Per-spec precomputation: eigenbasis of ``H/eta`` and transformed measure values."""

    def __init__(self, spec):
        E = spec.E
        eta = float(np.trace(E)) / spec.m
        if np.max(np.abs(E - eta * np.eye(spec.m))) > 1e-12 * abs(eta):
            raise UnsupportedSpec("covariance evaluation requires a scalar domain exponent E = eta I")
        self.eta = eta
        self.m, self.n = spec.m, spec.n
        lam, P = np.linalg.eig(spec.H / eta)
        if np.linalg.cond(P) > 1e8:
            raise UnsupportedSpec("H must be diagonalizable")
        self.P = P.astype(complex)
        self.Pinv = np.linalg.inv(self.P)
        self.alpha = (lam[:, None] + lam[None, :]).astype(complex)
        meas = spec.spherical
        self.measure = meas
        if isinstance(meas, AtomicMeasure):
            self.atom_dirs = np.array([unit(t)[: self.m] for t, _ in meas.atoms])
            self.atom_vals = self._transform([v for _, v in meas.atoms])
        else:
            arcs = meas.arcs() if isinstance(meas, PiecewiseMeasure) else [(0.0, 1.0, meas.value)]
            self.arcs = [(float(s), float(e)) for s, e, _ in arcs]
            self.arc_vals = self._transform([v for _, _, v in arcs])

    def _transform(self, values):
        V = np.array(values, dtype=complex)
        return np.einsum("ij,djk,lk->dil", self.Pinv, V, self.Pinv)

    def _assemble(self, dirs, weights, vals, t1, t2, radial, cfg):
        a = self.eta * dirs @ t1
        b = self.eta * dirs @ t2
        al = self.alpha.ravel()
        if radial == "analytic":
            I = radial_mellin(a, b, al)
        else:
            I = np.array([[radial_quadrature(ai, bi, x, cfg) for x in al] for ai, bi in zip(a, b)])
        I = I.reshape(len(a), self.n, self.n)
        inner = np.einsum("d,dij,dij->ij", weights.astype(complex), vals, I)
        return self.P @ inner @ self.P.T / self.eta

    def atomic(self, t1, t2, cfg, radial):
        w = np.ones(len(self.atom_dirs))
        return self._assemble(self.atom_dirs, w, self.atom_vals, t1, t2, radial, cfg)

    def angular(self, t1, t2, K, cfg, radial):
        xs, ws = _tanh_sinh(K)
        kinks = _kinks([t1, t2, t1 - t2])
        dirs, weights, idx = [], [], []
        for j, (s, e) in enumerate(self.arcs):
            for lo, hi in _split(s, e, kinks):
                half = 0.5 * (hi - lo)
                th = 2 * np.pi * (0.5 * (lo + hi) + half * xs)
                dirs.append(np.column_stack([np.cos(th), np.sin(th)]))
                weights.append(2 * np.pi * half * ws)
                idx.append(np.full(len(xs), j))
        dirs = np.vstack(dirs)
        weights = np.concatenate(weights)
        vals = self.arc_vals[np.concatenate(idx)]
        return self._assemble(dirs, weights, vals, t1, t2, radial, cfg)


def _engine(spec):
    eng = spec._cache.get("engine")
    if eng is None:
        eng = _Engine(spec)
        spec._cache["engine"] = eng
    return eng


def _point(t, m):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (m,) or not np.all(np.isfinite(t)):
        raise InvalidInput(f"expected a finite point in R^{m}")
    return t


@dataclass(frozen=True)
class CovarianceResult:
    value: np.ndarray
    error_estimate: float
    imag_residual: float


def covariance_detail(spec, t1, t2, cfg=None):
    """Covariance together with an a-posteriori error estimate."""
    cfg = cfg or QuadratureConfig()
    t1, t2 = _point(t1, spec.m), _point(t2, spec.m)
    n = spec.n
    if not np.any(t1) or not np.any(t2):
        return CovarianceResult(np.zeros((n, n)), 0.0, 0.0)
    eng = _engine(spec)
    if isinstance(spec.spherical, AtomicMeasure):
        G = eng.atomic(t1, t2, cfg, cfg.radial)
        err = 0.0
        if cfg.radial == "quadrature":
            fine = QuadratureConfig(**{**cfg.to_dict(), "radial_panels": 2 * cfg.radial_panels})
            G2 = eng.atomic(t1, t2, fine, cfg.radial)
            err = float(np.max(np.abs(G2 - G)))
            G = G2
    else:
        K = max(4, cfg.angular_nodes // 2)
        G_prev = eng.angular(t1, t2, K, cfg, cfg.radial)
        for _ in range(cfg.max_doublings):
            K *= 2
            G = eng.angular(t1, t2, K, cfg, cfg.radial)
            err = float(np.max(np.abs(G - G_prev)))
            if err <= cfg.rel_tol * max(float(np.max(np.abs(G))), 1e-300):
                break
            G_prev = G
        else:
            raise QuadratureFailure(f"angular quadrature did not reach rel_tol={cfg.rel_tol}", err)
    scale = max(float(np.max(np.abs(G))), 1e-300)
    imag = float(np.max(np.abs(G.imag)))
    if imag > 1e-8 * scale:
        raise NumericalFailure(f"covariance has imaginary residual {imag:.3e} (scale {scale:.3e})")
    return CovarianceResult(np.real(G).copy(), err, imag)


def covariance(spec, t1, t2, cfg=None):
    """Real ``n x n`` covariance ``E[X(t1) X(t2)^T]``."""
    return covariance_detail(spec, t1, t2, cfg).value


def structure_function(spec, t1, t2, cfg=None):
    """Increment covariance ``Γ(t1,t1) + Γ(t2,t2) - Γ(t1,t2) - Γ(t2,t1)``."""
    g12 = covariance(spec, t1, t2, cfg)
    return covariance(spec, t1, t1, cfg) + covariance(spec, t2, t2, cfg) - g12 - g12.T


def _rel(A, B):
    return float(np.linalg.norm(A - B) / max(np.linalg.norm(B), 1e-300))


def oss_check(spec, c, pairs, cfg=None):
    """Max relative deviation of ``Γ(c^E t1, c^E t2)`` from ``c^H Γ(t1, t2) c^H.T``."""
    cE = mat_pow(spec.E, c)
    cH = mat_pow(spec.H, c)
    dev = 0.0
    for t1, t2 in pairs:
        lhs = covariance(spec, cE @ np.atleast_1d(t1), cE @ np.atleast_1d(t2), cfg)
        rhs = cH @ covariance(spec, t1, t2, cfg) @ cH.T
        dev = max(dev, _rel(lhs, rhs))
    return dev


# ---------------------------------------------------------------- spectral measure checks


def polar_mass(spec, r1, r2, arc, nodes=64):
    """``F(B)`` for ``B = {r^(E.T) θ : r1 <= r < r2, angle(θ) in arc}`` by quadrature in log r."""
    x, w = _gl(nodes)
    lo, hi = math.log(r1), math.log(r2)
    u = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
    D = spec.spherical.mass(*arc)
    out = np.zeros_like(D)
    for uk, wk in zip(u, 0.5 * (hi - lo) * w):
        R = mat_pow(spec.H, math.exp(-uk))
        out += wk * R @ D @ R.T
    return out


DEFAULT_PROBES = ((0.5, 1.0, (0.0, 0.125)), (1.0, 3.0, (0.125, 0.375)), (0.2, 0.9, (0.3, 0.9)), (1.0, 2.0, (0.0, 1.0)))


def homogeneity_check(spec, c, probes=DEFAULT_PROBES):
    """Max relative deviation of ``F(c^(E.T) B)`` from ``c^-H F(B) c^-H.T`` over probe sets."""
    cH = mat_pow(spec.H, 1.0 / c)
    dev = 0.0
    for r1, r2, arc in probes:
        base = polar_mass(spec, r1, r2, arc)
        if np.max(np.abs(base)) == 0:
            continue
        scaled = polar_mass(spec, c * r1, c * r2, arc)
        dev = max(dev, _rel(scaled, cH @ base @ cH.T))
    return dev


def ofbm_density(H, A, x):
    """Spectral density of operator fractional Brownian motion at frequency ``x != 0``."""
    H = real_matrix(H)
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    if x == 0:
        raise SingularPoint("the density is singular at 0")
    AA = A @ A.conj().T
    M = -(H + 0.5 * np.eye(H.shape[0]))
    if x > 0:
        R = mat_pow(M, x)
        val = R @ AA @ R.T
    else:
        R = mat_pow(M, -x)
        val = R @ AA.conj() @ R.T
    return hermitian(val, tol=1e-10)


def ofbm_tail(H, A, x=1.0, epsrel=1e-12):
    """``∫_x^∞ f(y) dy`` for ``x > 0`` by adaptive quadrature over ``y = x e^u``.

    In ``u`` the integrand is ``y^-H AA* y^-H.T``, which decays like
    ``exp(-2 lam_min u)``; the range is cut where that falls below 1e-35.
    """
    if x <= 0:
        raise InvalidInput("x must be positive")
    H = real_matrix(H)
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    lam_min = float(np.min(np.linalg.eigvals(H).real))
    if lam_min <= 0:
        raise InvalidInput("H must have eigenvalues with positive real parts")
    AA = A @ A.conj().T
    lx = math.log(x)

    def f(u):
        R = mat_pow(-H, math.exp(lx + u)) if lx + u < 700 else expm(-(lx + u) * H)
        return R @ AA @ R.T

    upper = 40.0 / lam_min
    val, _ = scipy.integrate.quad_vec(f, 0.0, upper, epsrel=epsrel, epsabs=0.0, limit=4000)
    return val
