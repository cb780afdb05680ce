"""Smallest-eigenvalue computation for the assembled SPD matrices.

The production path is shift-free inverse power iteration with conjugate
gradient inner solves (Jacobi preconditioned); a dense eigendecomposition
serves as the validation oracle on small matrices.  Everything is
deterministic: the starting vector is fixed, so repeated runs agree bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fem import SparseSPD

MAX_DENSE_DIM = 5000


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted; carries the last iterate."""

    def __init__(self, message, lambda_estimate=None, vector=None, residual=None, iterations=None):
        super().__init__(message)
        self.lambda_estimate = lambda_estimate
        self.vector = vector
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class EigenResult:
    lambda_min: float
    residual: float
    iterations: int


def _start_vector(n: int) -> np.ndarray:
    # all ones, perturbed by an index-hashed +-1e-3 so the iteration cannot
    # start orthogonal to the target eigenvector; fully deterministic
    idx = np.arange(n, dtype=np.uint64)
    bits = (idx * np.uint64(2654435761)) & np.uint64(0x80000000)
    v = 1.0 + np.where(bits > 0, 1e-3, -1e-3)
    return v / np.linalg.norm(v)


def cg_solve(
    A: SparseSPD,
    b: np.ndarray,
    tol: float = 1e-10,
    precond: str | None = "jacobi",
    x0: np.ndarray | None = None,
    max_iter: int | None = None,
) -> np.ndarray:
    """Conjugate gradients for A x = b, stopping at ||Ax - b|| <= tol * ||b||.

    precond is None or "jacobi" (diagonal scaling).  An optional warm start x0
    is accepted; iteration cap defaults to 20 * n.
    """
    if precond not in (None, "jacobi"):
        raise ValueError(f"unknown preconditioner {precond!r}")
    b = np.asarray(b, dtype=float)
    norm_b = float(np.linalg.norm(b))
    if norm_b == 0.0:
        return np.zeros(A.n)
    if max_iter is None:
        max_iter = max(20 * A.n, 50)
    dinv = 1.0 / A.diagonal() if precond == "jacobi" else None

    if x0 is None:
        x = np.zeros(A.n)
        r = b.copy()
    else:
        x = np.array(x0, dtype=float)
        r = b - A.matvec(x)
    z = dinv * r if dinv is not None else r
    p = z.copy()
    rz = float(r @ z)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= tol * norm_b:
            return x
        Ap = A.matvec(p)
        alpha = rz / float(p @ Ap)
        x = x + alpha * p
        r = r - alpha * Ap
        z = dinv * r if dinv is not None else r
        rz_next = float(r @ z)
        p = z + (rz_next / rz) * p
        rz = rz_next
    if np.linalg.norm(r) <= tol * norm_b:
        return x
    raise ConvergenceError(
        f"cg stalled after {max_iter} iterations "
        f"(residual {np.linalg.norm(r) / norm_b:.3g} vs tol {tol:.3g})",
        vector=x,
        residual=float(np.linalg.norm(r) / norm_b),
        iterations=max_iter,
    )


def lambda_min_sparse(A: SparseSPD, tol: float = 1e-8, max_outer: int = 500) -> EigenResult:
    """Smallest eigenvalue by inverse power iteration.

    Each outer step solves A w = v by Jacobi-preconditioned CG; the inner
    tolerance tracks the current eigen-residual (never over-solving early).
    Converged when the Rayleigh quotient's relative change is <= tol and the
    eigen-residual ||Av - lambda v|| (v normalized) is <= 10 * tol.
    """
    if not 1e-14 < tol < 1e-2:
        raise ValueError(f"tol must lie in (1e-14, 1e-2), got {tol:g}")
    v = _start_vector(A.n)
    Av = A.matvec(v)
    lam = float(v @ Av)
    resid = float(np.linalg.norm(Av - lam * v))
    for it in range(1, max_outer + 1):
        inner_tol = max(1e-12, 0.01 * resid)
        w = cg_solve(A, v, tol=inner_tol, precond="jacobi", x0=v / lam)
        w = w / np.linalg.norm(w)
        Aw = A.matvec(w)
        lam_next = float(w @ Aw)
        resid = float(np.linalg.norm(Aw - lam_next * w))
        change = abs(lam_next - lam) / lam_next
        v, lam = w, lam_next
        if change <= tol and resid <= 10.0 * tol:
            return EigenResult(lambda_min=lam, residual=resid, iterations=it)
    raise ConvergenceError(
        f"inverse iteration did not converge in {max_outer} outer iterations "
        f"(last estimate {lam:.12g}, residual {resid:.3g})",
        lambda_estimate=lam,
        vector=v,
        residual=resid,
        iterations=max_outer,
    )


def lambda_min_dense(A: SparseSPD) -> float:
    """Dense-oracle smallest eigenvalue (vetted symmetric eigensolver)."""
    if A.n > MAX_DENSE_DIM:
        raise ValueError(f"dense oracle capped at n <= {MAX_DENSE_DIM}, got {A.n}")
    return float(np.linalg.eigvalsh(A.toarray())[0])
