"""Dense spectral routines for transition matrices.

Power iteration with deflation against the known leading pair is the fast
path; a 2x2 Rayleigh-Ritz projection resolves degenerate or complex
dominant pairs, and the full LAPACK spectrum is the fallback for matrices
up to QR_FALLBACK_DIM.  Matrices are plain float64/complex128 ndarrays.
"""

from dataclasses import dataclass

import numpy as np

QR_FALLBACK_DIM = 512


class ConvergenceError(RuntimeError):
    """Raised when an iterative solve fails and no fallback applies."""


@dataclass
class SpectralSummary:
    """Leading and subleading spectral data of a transition matrix.

    ``chi1`` is the modulus of the selected subleading eigenvalue;
    ``is_complex_pair`` marks a conjugate pair (the modulus is then the
    decay-relevant quantity).  ``residual`` certifies the reported pair.
    """

    lambda1: float
    chi1: float
    is_complex_pair: bool
    iterations: int
    residual: float


def matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Matrix-vector product with an explicit dimension check."""
    A = np.asarray(A)
    x = np.asarray(x)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    if x.shape != (A.shape[1],):
        raise ValueError(f"dimension mismatch: {A.shape} @ {x.shape}")
    return A @ x


def _residual(A, lam, v) -> float:
    return float(np.max(np.abs(A @ v - lam * v)) / np.max(np.abs(v)))


def leading_pair(A: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000):
    """Dominant eigenvalue with right and left eigenvectors.

    Power iteration on the matrix and its transpose from the all-ones
    start, stopped when successive Rayleigh quotients differ by less than
    ``tol`` and the eigenpair residual certifies the result.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]

    def iterate(M):
        x = np.ones(n) / np.sqrt(n)
        lam = None
        for k in range(1, max_iter + 1):
            y = M @ x
            norm = np.linalg.norm(y)
            if norm == 0:
                return 0.0, x, k
            x = y / norm
            q = float(x @ (M @ x))
            if lam is not None and abs(q - lam) < tol * max(1.0, abs(q)):
                if _residual(M, q, x) <= 10 * tol * max(1.0, abs(q)):
                    return q, x, k
            lam = q
        raise ConvergenceError(f"leading pair did not converge in {max_iter} steps")

    lam, v_right, _ = iterate(A)
    lam_left, v_left, _ = iterate(A.T)
    if abs(lam - lam_left) > 100 * tol * max(1.0, abs(lam)):
        raise ConvergenceError(
            f"left/right leading eigenvalues disagree: {lam} vs {lam_left}"
        )
    return lam, v_right, v_left


def _rayleigh_ritz_pair(Aop, x):
    """Eigenvalues of the 2x2 projection onto span{x, Aop(x)}."""
    y = Aop(x)
    q1 = x / np.linalg.norm(x)
    y2 = y - (q1 @ y) * q1
    norm2 = np.linalg.norm(y2)
    if norm2 < 1e-14 * np.linalg.norm(y):
        return None  # subspace is one-dimensional
    q2 = y2 / norm2
    Q = np.column_stack([q1, q2])
    H = Q.T @ np.column_stack([Aop(Q[:, 0]), Aop(Q[:, 1])])
    mus, vecs = np.linalg.eig(H)
    order = np.argsort(-mus.real)
    return [(mus[i], Q @ vecs[:, i]) for i in order]


def subdominant_modulus(
    A: np.ndarray, leading, tol: float = 1e-12, max_iter: int = 100_000
) -> SpectralSummary:
    """Subleading eigenvalue after deflating the leading pair.

    Among the remaining spectrum the eigenvalue of largest real part is
    selected (for a nonnegative matrix with spectrum inside [-lambda1,
    lambda1] the shifted operator A' + lambda1*I makes it the dominant
    mode, so plain power iteration finds it).  Complex pairs are resolved
    by a 2x2 Rayleigh-Ritz projection and reported by modulus; when the
    iteration stalls the full spectrum is computed for matrices up to
    QR_FALLBACK_DIM.
    """
    lam, v_right, v_left = leading
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    v_right = np.asarray(v_right, dtype=float)
    v_left = np.asarray(v_left, dtype=float)
    denom = float(v_left @ v_right)
    if denom == 0:
        raise ValueError("left and right leading vectors are orthogonal")
    scale = lam / denom

    def deflated(x):
        return A @ x - v_right * (scale * (v_left @ x))

    shift = abs(lam)
    x = np.ones(n) / np.sqrt(n)
    prev = None
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        y = deflated(x) + shift * x
        norm = np.linalg.norm(y)
        if norm == 0:
            break
        x = y / norm
        q = float(x @ (deflated(x) + shift * x))
        if prev is not None and abs(q - prev) < tol * max(1.0, abs(q)):
            mu = q - shift
            if _residual_op(deflated, mu, x) <= 10 * tol:
                converged = True
                break
        prev = q

    if converged:
        mu = float(x @ deflated(x))
        return SpectralSummary(
            lambda1=float(lam),
            chi1=abs(mu),
            is_complex_pair=False,
            iterations=iterations,
            residual=_residual_op(deflated, mu, x),
        )

    # two-dimensional dominant subspace (degenerate or complex pair)
    ritz = _rayleigh_ritz_pair(deflated, x)
    if ritz is not None:
        mu, v = ritz[0]
        res = _residual_op(deflated, mu, v)
        if res <= 10 * tol:
            return SpectralSummary(
                lambda1=float(lam),
                chi1=float(abs(mu)),
                is_complex_pair=bool(abs(mu.imag) > tol * max(1.0, abs(mu))),
                iterations=iterations,
                residual=res,
            )

    if n > QR_FALLBACK_DIM:
        raise ConvergenceError(
            f"subdominant iteration stalled and dim {n} exceeds QR fallback cap"
        )
    values, vectors = np.linalg.eig(A)
    drop = int(np.argmin(np.abs(values - lam)))
    keep = [i for i in range(n) if i != drop]
    best = max(keep, key=lambda i: values[i].real)
    mu = values[best]
    v = vectors[:, best]
    return SpectralSummary(
        lambda1=float(lam),
        chi1=float(abs(mu)),
        is_complex_pair=bool(abs(mu.imag) > 1e-12 * max(1.0, abs(mu))),
        iterations=iterations,
        residual=_residual(A, mu, v),
    )


def _residual_op(op, lam, v) -> float:
    return float(np.max(np.abs(op(v) - lam * v)) / np.max(np.abs(v)))


def dominant_eigenvalue(
    B: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000
):
    """Largest-modulus eigenvalue of a (possibly complex) matrix.

    Power iteration with a Rayleigh-quotient stop and eigendecomposition
    fallback for small matrices; returns (value, vector, iterations,
    residual).
    """
    B = np.asarray(B)
    n = B.shape[0]
    x = np.ones(n, dtype=complex) / np.sqrt(n)
    prev = None
    for iterations in range(1, max_iter + 1):
        y = B @ x
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0 + 0.0j, x, iterations, 0.0
        x = y / norm
        q = complex(np.conj(x) @ (B @ x))
        if prev is not None and abs(q - prev) < tol * max(1.0, abs(q)):
            res = _residual(B, q, x)
            if res <= 10 * tol:
                return q, x, iterations, res
        prev = q
    if n > QR_FALLBACK_DIM:
        raise ConvergenceError(f"power iteration stalled at dimension {n}")
    values, vectors = np.linalg.eig(B)
    best = int(np.argmax(np.abs(values)))
    mu = complex(values[best])
    v = vectors[:, best]
    return mu, v, max_iter, _residual(B, mu, v)
