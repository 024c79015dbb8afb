"""Dense complex linear algebra for open-system and circuit simulations.

Conventions used throughout the package:

* Density matrices and operators are plain complex numpy arrays.
* Vectorization is column-stacking, ``vec(rho) = rho.flatten(order="F")``,
  so that the operator identity ``vec(A rho B) = (B^T kron A) vec(rho)``
  holds exactly as written.
* Random sampling always goes through an explicit ``numpy.random.Generator``
  (or an integer seed), never global state.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as la

__all__ = [
    "as_rng",
    "vectorize",
    "devectorize",
    "sandwich_superoperator",
    "hs_inner",
    "haar_unitary",
    "eig_general",
    "DefectiveMatrixError",
]


class DefectiveMatrixError(np.linalg.LinAlgError):
    """Raised when a matrix has no usable biorthogonal eigenbasis."""


def as_rng(seed) -> np.random.Generator:
    """Coerce an int seed / SeedSequence / Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a d x d matrix into a length-d^2 vector.

    Columns are concatenated top to bottom: [[a, b], [c, d]] -> (a, c, b, d).
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.flatten(order="F")


def devectorize(vec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`; requires a perfect-square length."""
    vec = np.asarray(vec)
    if vec.ndim != 1:
        raise ValueError(f"expected a vector, got shape {vec.shape}")
    d = int(round(np.sqrt(vec.size)))
    if d * d != vec.size:
        raise ValueError(f"length {vec.size} is not a perfect square")
    return vec.reshape((d, d), order="F")


def sandwich_superoperator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of the map rho -> A rho B in the column-stacking convention.

    Returns B^T kron A, a d^2 x d^2 matrix satisfying
    ``sandwich_superoperator(A, B) @ vectorize(rho) == vectorize(A @ rho @ B)``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"A and B must be square with equal shapes, got {a.shape} and {b.shape}")
    return np.kron(b.T, a)


def hs_inner(sigma: np.ndarray, rho: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr[sigma^dag rho]."""
    sigma = np.asarray(sigma)
    rho = np.asarray(rho)
    if sigma.shape != rho.shape:
        raise ValueError(f"shape mismatch: {sigma.shape} vs {rho.shape}")
    return complex(np.vdot(sigma, rho))


def haar_unitary(d: int, rng) -> np.ndarray:
    """Draw a d x d unitary from the Haar measure.

    QR of a standard complex Ginibre matrix, with the phases of R's diagonal
    absorbed into Q. The phase correction is required: the raw LAPACK QR
    convention biases the distribution.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = as_rng(rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def _sort_order(w: np.ndarray, tie_tol: float) -> np.ndarray:
    """Order by descending real part; within groups of (near-)equal real
    parts, by descending imaginary part, then original index."""
    idx = np.lexsort((np.arange(w.size), -w.imag, -w.real))
    # regroup: runs whose real parts differ by less than tie_tol are ties
    out = list(idx)
    i = 0
    while i < len(out):
        j = i + 1
        while j < len(out) and abs(w[out[j]].real - w[out[i]].real) <= tie_tol:
            j += 1
        if j - i > 1:
            out[i:j] = sorted(out[i:j], key=lambda k: (-w[k].imag, k))
        i = j
    return np.asarray(out)


def eig_general(m: np.ndarray, defect_tol: float = 1e-12):
    """Eigendecomposition of a general complex matrix with biorthogonal
    left/right eigenvector pairs.

    Returns ``(w, right, left)`` where columns satisfy
    ``m @ right[:, k] = w[k] right[:, k]``,
    ``left[:, k].conj().T @ m = w[k] left[:, k].conj().T`` and
    ``left[:, j].conj() @ right[:, k] = delta_jk``.

    Eigenvalues are sorted by descending real part; real parts closer than
    1e-9 times the spectral radius count as tied and are ordered by
    descending imaginary part, then input order. Right eigenvectors keep
    unit norm with their largest-magnitude entry made real positive.

    Raises
    ------
    DefectiveMatrixError
        If some left/right pair has overlap below ``defect_tol`` after unit
        normalization, i.e. the matrix is defective (or numerically so);
        the message reports the offending eigenvalue.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    w, vl, vr = la.eig(m, left=True, right=True)

    radius = np.abs(w).max() if w.size else 0.0
    order = _sort_order(w, tie_tol=1e-9 * max(radius, 1e-300))
    w = w[order]
    vl = vl[:, order]
    vr = vr[:, order]

    # deterministic phase: largest-|entry| of each right vector real positive
    lead = np.abs(vr).argmax(axis=0)
    phases = vr[lead, np.arange(vr.shape[1])]
    phases = phases / np.abs(phases)
    vr = vr / phases
    vl = vl / phases

    overlaps = np.einsum("ia,ia->a", vl.conj(), vr)
    worst = np.abs(overlaps).argmin()
    if np.abs(overlaps[worst]) < defect_tol:
        raise DefectiveMatrixError(
            f"matrix is defective within tolerance: left/right overlap "
            f"{abs(overlaps[worst]):.3e} < {defect_tol:.3e} for eigenvalue "
            f"{w[worst]:.6g}"
        )
    vl = vl / overlaps.conj()
    return w, vr, vl
