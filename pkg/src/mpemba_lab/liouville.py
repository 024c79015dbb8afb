"""GKSL generators in vectorized form and their spectral decomposition.

The master equation

    drho/dt = -i[H, rho] + sum_mu lambda_mu (L rho L^dag - {L^dag L, rho}/2)

becomes, after column-stacking vectorization, a d^2 x d^2 matrix acting on
|rho>>. Its eigenmodes, ordered by decay rate, give the closed-form solution
rho(t) = sum_a exp(l_a t) c_a R_a, which is what every experiment in this
package propagates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .linalg import devectorize, eig_general, vectorize

__all__ = [
    "LindbladModel",
    "SpectralDecomposition",
    "InvalidGeneratorError",
    "NonUniqueSteadyStateError",
    "build_liouvillian",
    "decompose",
    "overlap_coefficients",
    "propagate",
    "relaxation_timescales",
]

HERMITICITY_TOL = 1e-10
SPECTRUM_TOL = 1e-8


class InvalidGeneratorError(ValueError):
    """The matrix is not a valid trace-preserving GKSL generator."""


class NonUniqueSteadyStateError(ValueError):
    """The generator's steady manifold is degenerate (Re l_2 = 0)."""


@dataclass
class LindbladModel:
    """Hamiltonian plus jump operators with non-negative rates.

    ``jumps`` is a list of ``(operator, rate)`` pairs. All operators must be
    square and share the Hamiltonian's dimension; H must be Hermitian.
    """

    hamiltonian: np.ndarray
    jumps: list = field(default_factory=list)

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
        scale = max(np.abs(h).max(), 1.0)
        if np.abs(h - h.conj().T).max() > HERMITICITY_TOL * scale:
            raise ValueError("Hamiltonian is not Hermitian within 1e-10")
        self.hamiltonian = h
        cleaned = []
        for op, rate in self.jumps:
            op = np.asarray(op, dtype=complex)
            if op.shape != h.shape:
                raise ValueError(
                    f"jump operator shape {op.shape} does not match Hamiltonian {h.shape}"
                )
            if rate < 0:
                raise ValueError(f"jump rate must be non-negative, got {rate}")
            cleaned.append((op, float(rate)))
        self.jumps = cleaned

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass
class SpectralDecomposition:
    """Ordered biorthogonal eigensystem of a vectorized GKSL generator.

    ``eigenvalues[0]`` is the zero mode; ``right[:, 0]`` devectorizes to the
    trace-one steady state and ``left[:, 0]`` is exactly the vectorized
    identity, so that c_1 = Tr[rho] = 1 for any state. Real parts are
    non-increasing. Instances are immutable by convention and safe to share
    across threads.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    _lu: tuple = None

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.right.shape[0])))

    @property
    def steady_state(self) -> np.ndarray:
        return devectorize(self.right[:, 0])


def build_liouvillian(model: LindbladModel) -> np.ndarray:
    """Assemble the vectorized generator of ``model``.

    L_hat = -i(1 kron H - H^T kron 1)
            + sum_mu lam_mu (L* kron L - [1 kron L^dag L + (L^dag L)^T kron 1]/2)
    """
    h = model.hamiltonian
    d = model.dim
    eye = np.eye(d)
    lhat = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for op, rate in model.jumps:
        ldl = op.conj().T @ op
        lhat += rate * (
            np.kron(op.conj(), op)
            - 0.5 * (np.kron(eye, ldl) + np.kron(ldl.T, eye))
        )
    return lhat


def decompose(lhat: np.ndarray) -> SpectralDecomposition:
    """Spectrally decompose a vectorized GKSL generator.

    Eigenvalues are sorted by descending real part (ties by descending
    imaginary part). The zero mode is pinned so that the left mode is the
    vectorized identity and the steady state has unit trace. Coefficient
    extraction later goes through an LU solve against the right-eigenvector
    basis, which stays accurate even when the generator is strongly
    non-normal and individual left/right overlaps are tiny.

    Raises
    ------
    InvalidGeneratorError
        If any eigenvalue has real part above 1e-8, or the slowest mode is
        not a zero mode, or the zero mode's left vector is not the identity.
    """
    lhat = np.asarray(lhat, dtype=complex)
    w, right, left = eig_general(lhat)

    radius = np.abs(w).max()
    tol = SPECTRUM_TOL * max(radius, 1.0)
    if w.real.max() > tol:
        raise InvalidGeneratorError(
            f"positive eigenvalue real part {w.real.max():.3e} exceeds tolerance; "
            "not a completely positive generator"
        )
    zero_modes = np.flatnonzero(np.abs(w) <= tol)
    if zero_modes.size == 0:
        raise InvalidGeneratorError("no zero mode found; the generator has no steady state")
    if zero_modes.size > 1:
        raise NonUniqueSteadyStateError(
            f"{zero_modes.size} zero modes found; the steady manifold is degenerate"
        )
    k = int(zero_modes[0])
    if k != 0:
        # purely imaginary eigenvalues sorted ahead of the zero mode; all
        # share Re = 0 so moving it to the front keeps Re non-increasing
        order = [k] + [i for i in range(w.size) if i != k]
        w, right, left = w[order], right[:, order], left[:, order]

    d = int(round(np.sqrt(lhat.shape[0])))
    identity_vec = vectorize(np.eye(d)).astype(complex)
    lead = left[:, 0]
    alignment = abs(np.vdot(identity_vec, lead)) / (np.sqrt(d) * np.linalg.norm(lead))
    if alignment < 1.0 - 1e-6:
        raise InvalidGeneratorError(
            "zero mode's left eigenvector is not the identity; "
            "the generator does not preserve trace"
        )
    # pin the zero-mode pair: left = vec(1), Tr[devec(right)] = 1
    left = left.copy()
    right = right.copy()
    left[:, 0] = identity_vec
    right[:, 0] = right[:, 0] / np.trace(devectorize(right[:, 0]))

    lu = la.lu_factor(right)
    return SpectralDecomposition(eigenvalues=w, right=right, left=left, _lu=lu)


def overlap_coefficients(dec: SpectralDecomposition, rho0: np.ndarray) -> np.ndarray:
    """Expansion coefficients c_a = <<L_a|rho0>> of a state over the modes.

    Evaluated by LU-solving ``right @ c = vec(rho0)``; identical to the left
    inner products but numerically backward-stable. For a unit-trace state,
    c_1 = 1.
    """
    b = vectorize(np.asarray(rho0, dtype=complex))
    if b.size != dec.right.shape[0]:
        raise ValueError(
            f"state dimension {int(round(np.sqrt(b.size)))} does not match "
            f"decomposition dimension {dec.dim}"
        )
    return la.lu_solve(dec._lu, b)


def propagate(dec: SpectralDecomposition, rho0: np.ndarray, t: float) -> np.ndarray:
    """Evolve ``rho0`` for time ``t`` via the mode expansion.

    Returns devectorize(sum_a exp(l_a t) c_a R_a), symmetrized to remove
    machine-level Hermiticity drift.
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    c = overlap_coefficients(dec, rho0)
    v = dec.right @ (c * np.exp(dec.eigenvalues * t))
    rho = devectorize(v)
    return 0.5 * (rho + rho.conj().T)


def relaxation_timescales(dec: SpectralDecomposition) -> tuple:
    """Slowest and next-slowest relaxation timescales (tau_2, tau_3).

    tau_a = 1/|Re l_a|; the magnitude makes the timescales positive. Raises
    :class:`NonUniqueSteadyStateError` when Re l_2 vanishes (degenerate
    steady manifold).
    """
    w = dec.eigenvalues
    if w.size < 3:
        raise ValueError("need at least three eigenvalues")
    radius = np.abs(w).max()
    if abs(w[1].real) <= SPECTRUM_TOL * max(radius, 1.0):
        raise NonUniqueSteadyStateError(
            f"Re(l_2) = {w[1].real:.3e} vanishes: steady state is not unique"
        )
    return 1.0 / abs(w[1].real), 1.0 / abs(w[2].real)
