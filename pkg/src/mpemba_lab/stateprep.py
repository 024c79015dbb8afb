"""Initial states and the preparation transforms that accelerate relaxation.

Three transforms are provided:

* an orthogonalizing rotation U(s) = U_B(s) U_A that maps a pure state onto
  a superposition of two eigenvectors of the slowest mode's matrix form,
  with the angle s* chosen so the state's overlap with that mode vanishes;
* a diagonalizing unitary whose columns are the state's eigenvectors, which
  removes all coherences (used where the slow modes are coherence modes);
* a QR-projected perturbation U_eps = QR(U_T + eps U_P) modelling noisy
  application of a target unitary U_T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .linalg import as_rng, devectorize, haar_unitary
from .liouville import SpectralDecomposition

__all__ = [
    "MethodInapplicableError",
    "OrthogonalizingRotation",
    "PreparationError",
    "random_state_vector",
    "random_pure_state",
    "build_rotation",
    "apply_rotation",
    "diagonalizing_unitary",
    "perturb_unitary",
]


class MethodInapplicableError(ValueError):
    """The orthogonalizing-rotation construction does not apply."""


@dataclass
class PreparationError:
    """Noise model for state preparation.

    kind "angle-relative": the rotation angle becomes s*(1 + epsilon).
    kind "qr-perturbation": the target unitary is perturbed by epsilon times
    a Haar unitary and re-unitarized by QR.
    """

    epsilon: float
    kind: str = "angle-relative"
    seed: int = 0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("error magnitude must be non-negative")
        if self.kind not in ("angle-relative", "qr-perturbation"):
            raise ValueError(f"unknown error kind {self.kind!r}")


@dataclass
class OrthogonalizingRotation:
    """Rotation built by :func:`build_rotation`.

    ``basis`` holds the eigenvectors of the slow mode's matrix form as
    columns (eigenvalues ``weights``, descending); ``u_a`` maps the input
    state onto ``basis[:, 0]``; index ``n`` is the partner eigenvector and
    ``s_star`` the exact orthogonalizing angle.
    """

    u_a: np.ndarray
    basis: np.ndarray
    weights: np.ndarray
    n: int
    s_star: float

    def unitary(self, s: float) -> np.ndarray:
        """U(s) = U_B(s) U_A with U_B = exp(-i s F), F the plane generator."""
        phi1 = self.basis[:, 0]
        phin = self.basis[:, self.n]
        f = np.outer(phin, phi1.conj())
        f = f + f.conj().T
        d = self.u_a.shape[0]
        u_b = np.eye(d) - 1j * np.sin(s) * f + (np.cos(s) - 1.0) * (f @ f)
        return u_b @ self.u_a


def random_state_vector(dim: int, rng, support: int = None) -> np.ndarray:
    """Haar-uniform pure state vector; optionally supported on the first
    ``support`` components only (embedded in dimension ``dim``)."""
    rng = as_rng(rng)
    k = dim if support is None else support
    if not 1 <= k <= dim:
        raise ValueError("support must lie in [1, dim]")
    psi = np.zeros(dim, dtype=complex)
    psi[:k] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return psi / np.linalg.norm(psi)


def random_pure_state(dim: int, seed) -> np.ndarray:
    """Haar-random rank-one density matrix |psi><psi|."""
    psi = random_state_vector(dim, seed)
    return np.outer(psi, psi.conj())


def _complete_basis(psi: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis whose first column is psi, completed by
    Gram-Schmidt over the standard basis (near-parallel vectors skipped)."""
    d = psi.size
    cols = [psi]
    for k in range(d):
        if len(cols) == d:
            break
        v = np.zeros(d, dtype=complex)
        v[k] = 1.0
        for b in cols:
            v -= np.vdot(b, v) * b
        norm = np.linalg.norm(v)
        if norm > tol:
            cols.append(v / norm)
    if len(cols) != d:
        raise RuntimeError("basis completion failed")  # unreachable for unit psi
    return np.column_stack(cols)


def build_rotation(dec: SpectralDecomposition, psi: np.ndarray) -> OrthogonalizingRotation:
    """Construct the rotation that removes a pure state's overlap with the
    slowest decaying mode.

    The matrix form of the slowest mode's left eigenvector must be Hermitian
    (up to a global phase, which is fixed automatically); its eigenvectors
    {phi_i} and eigenvalues {alpha_i} define U_A = sum_i |phi_i><psi_i| with
    psi_1 = psi, and the angle s* = arctan sqrt(|alpha_1/alpha_n|) zeroes
    the overlap alpha_1 cos^2 s + alpha_n sin^2 s. The partner index n is
    the largest-magnitude eigenvalue of sign opposite to alpha_1.

    Raises
    ------
    MethodInapplicableError
        If the mode's matrix form is not Hermitian (coherence-type slow
        modes), or no opposite-sign eigenvalue exists.
    """
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    if psi.size != dec.dim:
        raise ValueError(f"state dimension {psi.size} does not match decomposition {dec.dim}")

    mode = devectorize(dec.left[:, 1])
    # a Hermitian matrix times a global phase exp(i ph) has Tr[M^2] real
    # positive only after the phase is removed
    phase = 0.5 * np.angle(np.trace(mode @ mode))
    mode = mode * np.exp(-1j * phase)
    scale = np.abs(mode).max()
    if np.abs(mode - mode.conj().T).max() > 1e-8 * scale:
        raise MethodInapplicableError(
            "slowest mode is not Hermitian in matrix form; "
            "the orthogonalizing rotation is not defined for this generator"
        )
    mode = 0.5 * (mode + mode.conj().T)

    alphas, phis = la.eigh(mode)
    alphas = alphas[::-1]
    phis = phis[:, ::-1]

    a1 = alphas[0]
    opposite = np.flatnonzero(np.sign(alphas) == -np.sign(a1))
    if opposite.size == 0:
        raise MethodInapplicableError(
            "all eigenvalues of the slow mode share one sign; "
            "no orthogonalizing angle exists"
        )
    n = int(opposite[np.abs(alphas[opposite]).argmax()])
    s_star = float(np.arctan(np.sqrt(abs(a1 / alphas[n]))))

    u_a = phis @ _complete_basis(psi).conj().T
    return OrthogonalizingRotation(u_a=u_a, basis=phis, weights=alphas, n=n, s_star=s_star)


def apply_rotation(
    rot: OrthogonalizingRotation, rho: np.ndarray, err: PreparationError = None
) -> np.ndarray:
    """Conjugate ``rho`` by U(s) at the (possibly angle-perturbed) angle
    s = s*(1 + epsilon). With epsilon = 0 this is the exact
    orthogonalization."""
    if err is not None and err.kind != "angle-relative":
        raise ValueError("apply_rotation models angle-relative errors only")
    eps = 0.0 if err is None else err.epsilon
    u = rot.unitary(rot.s_star * (1.0 + eps))
    return u @ np.asarray(rho, dtype=complex) @ u.conj().T


def diagonalizing_unitary(rho: np.ndarray) -> np.ndarray:
    """Unitary whose columns are the eigenvectors of ``rho`` ordered by
    descending eigenvalue, so U^dag rho U is diagonal.

    Column phases are fixed (first significant component real positive) for
    deterministic output under degeneracies.
    """
    rho = np.asarray(rho, dtype=complex)
    scale = max(np.abs(rho).max(), 1.0)
    if np.abs(rho - rho.conj().T).max() > 1e-10 * scale:
        raise ValueError("state must be Hermitian")
    _, vecs = la.eigh(rho)
    vecs = vecs[:, ::-1]
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        lead = np.flatnonzero(np.abs(col) > 1e-12)[0]
        vecs[:, k] = col * (np.abs(col[lead]) / col[lead])
    return vecs


def perturb_unitary(u_target: np.ndarray, epsilon: float, seed) -> np.ndarray:
    """Unitary at controlled distance from ``u_target``.

    Forms u_target + epsilon * U_P with U_P Haar-random, then returns the Q
    of its QR decomposition with R's diagonal made real positive. The phase
    convention makes epsilon = 0 an exact no-op; without it Q would equal
    u_target times residual diagonal phases.
    """
    u_target = np.asarray(u_target, dtype=complex)
    if epsilon < 0:
        raise ValueError("perturbation size must be non-negative")
    rng = as_rng(seed)
    u_p = haar_unitary(u_target.shape[0], rng)
    q, r = np.linalg.qr(u_target + epsilon * u_p)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))
