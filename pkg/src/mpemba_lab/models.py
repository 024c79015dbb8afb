"""The two open-system models studied in the experiments.

* A collective-spin model: N spins with a transverse-field Hamiltonian plus
  an Sx^2 interaction and a single Hermitian collective jump operator
  proportional to Sx, obtained from adiabatic elimination of a lossy bosonic
  mode. Simulated in the maximal-spin (N+1)-dimensional sector, which is
  dynamically closed since both operators are polynomials in total-spin
  operators.
* A damped harmonic oscillator coupled to a thermal bath, truncated to d
  levels. Pick the generator dimension a few levels above the largest
  occupied state: truncation distorts the spectrum near the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liouville import LindbladModel

__all__ = [
    "DickeParams",
    "OscillatorParams",
    "spin_operators",
    "dicke_model",
    "oscillator_model",
]


@dataclass
class DickeParams:
    """Collective-spin model parameters, energies in units of the field Omega."""

    n_spins: int
    omega: float = 1.0   # bosonic mode frequency
    g: float = 1.0       # spin-boson coupling
    kappa: float = 1.0   # bosonic loss rate
    field: float = 1.0   # longitudinal field Omega (the energy unit)

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("need at least one spin")
        if self.kappa <= 0:
            raise ValueError("loss rate kappa must be positive")


@dataclass
class OscillatorParams:
    """Thermally damped oscillator parameters.

    Give either ``nbar`` (mean bath occupation) directly or ``beta`` (inverse
    temperature), from which nbar = 1/(exp(beta*omega0) - 1).
    """

    dim: int
    omega0: float = 1.0
    gamma: float = 1.0
    nbar: float = None
    beta: float = None

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("truncation dimension must be >= 2")
        if self.gamma <= 0:
            raise ValueError("coupling rate gamma must be positive")
        if self.nbar is None:
            if self.beta is None:
                raise ValueError("provide nbar or beta")
            self.nbar = 1.0 / np.expm1(self.beta * self.omega0)
        if self.nbar < 0:
            raise ValueError("mean occupation must be non-negative")


def spin_operators(n_spins: int):
    """Total-spin matrices (Sx, Sz) in the maximal sector J = N/2.

    Sz is diagonal with entries J, J-1, ..., -J; Sx = (S+ + S-)/2 with the
    standard ladder coefficients sqrt(J(J+1) - m(m+1)).
    """
    if n_spins < 1:
        raise ValueError("need at least one spin")
    j = n_spins / 2.0
    dim = n_spins + 1
    m = j - np.arange(dim)
    sz = np.diag(m).astype(complex)
    raise_op = np.zeros((dim, dim), dtype=complex)
    for i in range(1, dim):
        raise_op[i - 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    sx = 0.5 * (raise_op + raise_op.conj().T)
    return sx, sz


def dicke_model(p: DickeParams) -> LindbladModel:
    """Reduced collective-spin model after adiabatic elimination.

    H = Omega Sz - [4 omega g^2 / (4 omega^2 + kappa^2)] Sx^2 / N with a
    single jump operator [2|g| sqrt(kappa) / sqrt(4 omega^2 + kappa^2)]
    Sx / sqrt(N) at unit rate.
    """
    sx, sz = spin_operators(p.n_spins)
    denom = 4.0 * p.omega**2 + p.kappa**2
    h = p.field * sz - (4.0 * p.omega * p.g**2 / denom) * (sx @ sx) / p.n_spins
    jump = (2.0 * abs(p.g) * np.sqrt(p.kappa) / np.sqrt(denom)) * sx / np.sqrt(p.n_spins)
    return LindbladModel(hamiltonian=h, jumps=[(jump, 1.0)])


def oscillator_model(p: OscillatorParams) -> LindbladModel:
    """Damped oscillator: H = omega0 a^dag a with thermal jump operators
    sqrt(gamma(nbar+1)) a and sqrt(gamma nbar) a^dag, truncated to p.dim."""
    a = np.zeros((p.dim, p.dim), dtype=complex)
    ns = np.arange(1, p.dim)
    a[ns - 1, ns] = np.sqrt(ns)
    h = p.omega0 * (a.conj().T @ a)
    jumps = [(np.sqrt(p.gamma * (p.nbar + 1.0)) * a, 1.0)]
    if p.nbar > 0:
        jumps.append((np.sqrt(p.gamma * p.nbar) * a.conj().T, 1.0))
    return LindbladModel(hamiltonian=h, jumps=jumps)
