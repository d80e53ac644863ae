"""Small dense matrix kernel: Hermitian structure, matrix powers, square roots."""

import numpy as np
import scipy.linalg

from .errors import InvalidInput, SingularInput

MAX_DIM = 4


def real_matrix(M, *, square=True):
    """Return ``M`` as a finite float array, checking shape limits."""
    A = np.array(M, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2:
        raise InvalidInput(f"expected a matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {A.shape}")
    if max(A.shape) > MAX_DIM:
        raise InvalidInput(f"dimension {A.shape} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    return A


def hermitian(M, tol=1e-12):
    """Check ``M = M*`` up to ``tol`` (relative) and return the exactly symmetrized copy."""
    A = np.array(M, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.conj().T)) > tol * scale:
        raise InvalidInput("matrix is not Hermitian")
    return (A + A.conj().T) / 2


def _expm2(A):
    # exp of a real 2x2 matrix via trace/determinant: with B = A - sI trace-free,
    # B @ B = q I where q = -det(B).
    s = 0.5 * (A[0, 0] + A[1, 1])
    B = A - s * np.eye(2)
    q = -(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0])
    if abs(q) < 1e-8:
        ch = 1.0 + q / 2 + q * q / 24
        shc = 1.0 + q / 6 + q * q / 120
    elif q > 0:
        w = np.sqrt(q)
        ch, shc = np.cosh(w), np.sinh(w) / w
    else:
        w = np.sqrt(-q)
        ch, shc = np.cos(w), np.sin(w) / w
    return np.exp(s) * (ch * np.eye(2) + shc * B)


def expm(A):
    """Matrix exponential; closed form up to 2x2, scipy beyond."""
    A = real_matrix(A)
    if A.shape == (1, 1):
        return np.exp(A)
    if A.shape == (2, 2):
        return _expm2(A)
    return scipy.linalg.expm(A)


def mat_pow(M, c):
    """``c**M = exp(M log c)`` for a real square matrix and ``c > 0``."""
    if not np.isscalar(c) or not np.isfinite(c) or c <= 0:
        raise InvalidInput(f"power base must be a positive finite scalar, got {c!r}")
    A = real_matrix(M)
    return expm(A * np.log(c))


def eig2_sym(M):
    """Closed-form eigendecomposition of a real symmetric 2x2 matrix.

    Eigenvalues are returned in descending order; the columns of the second
    output are orthonormal eigenvectors whose first nonzero entry is positive.
    """
    A = real_matrix(M)
    if A.shape != (2, 2):
        raise InvalidInput("eig2_sym expects a 2x2 matrix")
    if abs(A[0, 1] - A[1, 0]) > 1e-12 * max(1.0, np.max(np.abs(A))):
        raise InvalidInput("matrix is not symmetric")
    a, b, d = A[0, 0], 0.5 * (A[0, 1] + A[1, 0]), A[1, 1]
    m = 0.5 * (a + d)
    r = np.hypot(0.5 * (a - d), b)
    vals = np.array([m + r, m - r])
    if r <= 1e-15 * max(abs(m), np.finfo(float).tiny):
        return np.array([m, m]), np.eye(2)
    phi = 0.5 * np.arctan2(2 * b, a - d)
    V = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    for k in range(2):
        v = V[:, k]
        lead = v[np.flatnonzero(np.abs(v) > 1e-15)[0]]
        if lead < 0:
            V[:, k] = -v
    return vals, V


def pd_sqrt(M):
    """Symmetric positive definite square root of a real SPD matrix."""
    A = np.asarray(M)
    if np.iscomplexobj(A):
        if np.max(np.abs(A.imag)) > 1e-12 * max(1.0, np.max(np.abs(A))):
            raise InvalidInput("pd_sqrt expects a real matrix")
        A = A.real
    A = real_matrix(A)
    if np.max(np.abs(A - A.T)) > 1e-12 * max(1.0, np.max(np.abs(A))):
        raise InvalidInput("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    w, V = np.linalg.eigh(A)
    if w[0] <= 1e-12 * max(w[-1], 0.0) or w[-1] <= 0:
        raise SingularInput(f"matrix is not positive definite (eigenvalues {w})")
    if A.shape == (2, 2):
        sd = np.sqrt(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
        S = (A + sd * np.eye(2)) / np.sqrt(A[0, 0] + A[1, 1] + 2 * sd)
    else:
        S = (V * np.sqrt(w)) @ V.T
    return 0.5 * (S + S.T)


def is_psd(M, tol=1e-10):
    """True iff the smallest eigenvalue is at least ``-tol * max(1, largest)``."""
    w = np.linalg.eigvalsh(hermitian(M, tol=max(tol, 1e-12)))
    return bool(w[0] >= -tol * max(1.0, w[-1]))


def is_pd(M, tol=1e-12):
    w = np.linalg.eigvalsh(hermitian(M))
    return bool(w[-1] > 0 and w[0] > tol * w[-1])


def scalar_ratio(W1, W2, tol=1e-10):
    """Return ``w > 0`` with ``W1 = w W2`` (relative Frobenius test), else None."""
    W1 = np.asarray(W1, dtype=float)
    W2 = np.asarray(W2, dtype=float)
    R = W1 @ np.linalg.inv(W2)
    w = np.trace(R) / R.shape[0]
    if w <= 0:
        return None
    if np.linalg.norm(R - w * np.eye(R.shape[0])) > tol * abs(w) * np.sqrt(R.shape[0]):
        return None
    return float(w)
