"""
Sparse symmetric storage, Jacobi preconditioned conjugate gradients and
extreme eigenvalue estimates for condition numbers.
"""
import time
import numpy as np
import scipy.sparse as sp
from collections import namedtuple
from cutfem.errors import ContractViolationError, NonConvergenceError, fail
from cutfem.utils import print_info_msg, print_warn_msg

SolveReport = namedtuple("SolveReport", ["iterations", "residual", "wall_time"])
ConditionEstimate = namedtuple("ConditionEstimate", ["lambda_max", "lambda_min", "kappa"])

DROP_TOLERANCE = 1e-300
EIGEN_SEED = 42

def finalize_matrix(matrix, shape=None, symmetric=True):
    """
    Converts to CSR with summed duplicates, ascending column indices
    and no stored entries below 1e-300 in magnitude.

    Parameters
    ----------
    * matrix                        : (scipy.sparse matrix or tuple) Matrix, or a
                                        (values, (rows, cols)) triplet tuple.
    * shape                         : (tuple) Shape, needed for triplet input.
    * symmetric                     : (bool) Replace the matrix by (A + A^T) / 2 so that
                                        the stored values are exactly symmetric.

    Returns
    -------
    * matrix                        : (scipy.sparse.csr_matrix) Finalized matrix.
    """
    if isinstance(matrix, tuple):
        matrix = sp.coo_matrix(matrix, shape=shape)
    matrix = sp.csr_matrix(matrix, dtype=np.float64)
    matrix.sum_duplicates()
    if symmetric:
        matrix = sp.csr_matrix(0.5*(matrix + matrix.T))
    matrix.data[np.abs(matrix.data) < DROP_TOLERANCE] = 0.0
    matrix.eliminate_zeros()
    matrix.sort_indices()
    return matrix

def zero_matrix(n):
    return sp.csr_matrix((n, n), dtype=np.float64)

def is_symmetric(matrix, rtol=1e-12):
    """True when max |A - A^T| <= rtol max |A|."""
    scale = abs(matrix).max() if matrix.nnz else 0.0
    diff = abs(matrix - matrix.T)
    return (diff.max() if diff.nnz else 0.0) <= rtol*scale

def solve_spd(A, b, tol=1e-10, max_iterations=None, x0=None):
    """
    Conjugate gradients with diagonal (Jacobi) preconditioning.

    Parameters
    ----------
    * A                             : (scipy.sparse matrix) Symmetric positive definite matrix.
    * b                             : (np.array) Right hand side.
    * tol                           : (float) Relative residual target |Ax - b| / |b|.
    * max_iterations                : (int) Iteration cap. Default: 20 * dim.
    * x0                            : (np.array) Initial guess. Default: zero.

    Returns
    -------
    * x                             : (np.array) Solution.
    * report                        : (SolveReport) Iterations, true final relative
                                        residual and wall time in seconds.

    Raises
    ------
    * ContractViolationError
                                    * If the dimensions of A and b differ.
    * NonConvergenceError
                                    * If the true residual does not reach tol within the
                                      cap; carries the report.
    """
    start = time.perf_counter()
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or b.shape != (n,):
        fail(ContractViolationError, "Dimension mismatch: matrix %s, vector %s."%(A.shape, b.shape))
    if max_iterations is None:
        max_iterations = 20*n

    normb = np.linalg.norm(b)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    if normb == 0.0:
        x = np.zeros(n)
        return x, SolveReport(0, 0.0, time.perf_counter() - start)

    diagonal = A.diagonal()
    if np.any(diagonal <= 0.0):
        fail(ContractViolationError, "Matrix has non-positive diagonal entries; it is not SPD.")
    inv_diagonal = 1.0/diagonal

    r = b - A @ x
    z = inv_diagonal*r
    p = z.copy()
    gamma = r @ z
    tolb = tol*normb
    iterations = 0
    converged = np.linalg.norm(r) <= tolb
    while not converged and iterations < max_iterations:
        Ap = A @ p
        alpha = gamma/(p @ Ap)
        x += alpha*p
        r -= alpha*Ap
        iterations += 1
        if np.linalg.norm(r) <= tolb:
            # Convergence is decided on the true residual b - Ax.
            r = b - A @ x
            if np.linalg.norm(r) <= tolb:
                converged = True
                break
        z = inv_diagonal*r
        gamma_old = gamma
        gamma = r @ z
        p = z + (gamma/gamma_old)*p

    residual = np.linalg.norm(b - A @ x)/normb
    report = SolveReport(iterations, float(residual), time.perf_counter() - start)
    if not converged:
        fail(NonConvergenceError, "CG did not converge in %d iterations (relative residual %.3e)."%(max_iterations, residual), report)
    return x, report

def _start_vector(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    return x/np.linalg.norm(x)

def power_iteration(A, tol=1e-6, max_iterations=20000, seed=EIGEN_SEED):
    """
    Largest eigenvalue of a symmetric positive semidefinite matrix by
    power iteration with Rayleigh quotients; stops when the relative
    change of the estimate drops to tol.
    """
    x = _start_vector(A.shape[0], seed)
    lam = 0.0
    for _ in range(max_iterations):
        y = A @ x
        lam_new = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y/norm
        if lam_new > 0.0 and abs(lam_new - lam) <= tol*abs(lam_new):
            return lam_new
        lam = lam_new
    print_warn_msg("Power iteration stopped after %d iterations."%(max_iterations))
    return lam

def inverse_iteration(A, tol=1e-6, max_iterations=500, seed=EIGEN_SEED, solve_tol=None):
    """
    Smallest eigenvalue of a symmetric positive definite matrix by
    inverse iteration, each step a solve_spd call. The solves default to
    a relative residual of 1e-3 tol (at least 1e-12): with a unit right
    hand side this bounds the relative error of each Rayleigh quotient.
    """
    if solve_tol is None:
        solve_tol = max(1e-3*tol, 1e-12)
    x = _start_vector(A.shape[0], seed)
    mu = 0.0
    for _ in range(max_iterations):
        y, _report = solve_spd(A, x, tol=solve_tol)
        mu_new = float(x @ y)
        x = y/np.linalg.norm(y)
        if mu_new > 0.0 and abs(mu_new - mu) <= tol*abs(mu_new):
            return 1.0/mu_new
        mu = mu_new
    print_warn_msg("Inverse iteration stopped after %d iterations."%(max_iterations))
    return 1.0/mu

def condition_estimate(A, tol=1e-6, seed=EIGEN_SEED):
    """
    Two-sided estimate of the spectral condition number.

    Parameters
    ----------
    * A                             : (scipy.sparse matrix) Symmetric positive definite matrix.
    * tol                           : (float) Relative change at which both iterations stop.
    * seed                          : (int) Seed of the start vectors.

    Returns
    -------
    * estimate                      : (ConditionEstimate) lambda_max, lambda_min and kappa.
    """
    lambda_max = power_iteration(A, tol=tol, seed=seed)
    lambda_min = inverse_iteration(A, tol=tol, seed=seed)
    kappa = lambda_max/lambda_min
    print_info_msg("Condition estimate: lambda_max = %.4e, lambda_min = %.4e, kappa = %.4e."%(lambda_max, lambda_min, kappa))
    return ConditionEstimate(lambda_max, lambda_min, kappa)
