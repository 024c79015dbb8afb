"""Charge-conserving random unitary circuits on tilted ferromagnetic chains.

Two-qubit gates are block-diagonal across the magnetization sectors of the
pair (random phases on |00> and |11>, a Haar 2x2 block on {|01>, |10>}),
so every layer commutes with the total charge exactly by construction. Layers
apply gates on even bonds then odd bonds with periodic boundary conditions.

Site 0 is the most significant bit of the amplitude index. Subsystem
observables (entanglement asymmetry, charge-sector overlaps) act on the
reduced state of a small block of contiguous sites.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import comb

import numpy as np
import scipy.linalg as la

from .linalg import as_rng, haar_unitary
from .stateprep import perturb_unitary

__all__ = [
    "CircuitState",
    "ChargeSectorTable",
    "RucTrajectory",
    "sample_u1_gate",
    "sample_layer_gates",
    "apply_two_site_gate",
    "apply_brickwork_layer",
    "tilted_ferromagnet",
    "reduced_density",
    "charge_decohere",
    "entanglement_asymmetry",
    "sector_overlaps",
    "run_ruc_experiment",
    "dimension_sweep",
]

MAX_SUBSYSTEM = 8


@dataclass
class CircuitState:
    """Pure state of an N-qubit chain plus circuit metadata."""

    n_sites: int
    amplitudes: np.ndarray
    depth: int = 0
    theta: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.n_sites % 2 != 0:
            raise ValueError("brickwork pairing needs an even number of sites")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_sites,):
            raise ValueError(
                f"amplitude vector must have length 2^{self.n_sites}, got {amps.shape}"
            )
        self.amplitudes = amps


@dataclass
class ChargeSectorTable:
    """Charge sectors of a block of ``n_sites`` qubits.

    Sector q collects computational basis states with q up-spins; its
    dimension is binomial(n_sites, q).
    """

    n_sites: int
    labels: np.ndarray = field(init=False)
    masks: list = field(init=False)
    dims: np.ndarray = field(init=False)

    def __post_init__(self):
        charges = np.array(
            [bin(i).count("1") for i in range(2**self.n_sites)], dtype=int
        )
        self.labels = np.arange(self.n_sites + 1)
        self.masks = [np.flatnonzero(charges == q) for q in self.labels]
        self.dims = np.array([comb(self.n_sites, q) for q in self.labels], dtype=float)
        self._charges = charges


@dataclass
class RucTrajectory:
    """Averaged entanglement-asymmetry trajectory of one circuit ensemble."""

    theta: float
    epsilon: float
    depths: np.ndarray
    ea: np.ndarray          # (realizations, depth+1)
    sector_probs: np.ndarray  # mean initial subsystem p_q

    @property
    def realizations(self) -> int:
        return self.ea.shape[0]

    @property
    def ea_mean(self) -> np.ndarray:
        return self.ea.mean(axis=0)

    @property
    def ea_stderr(self) -> np.ndarray:
        if self.realizations < 2:
            return np.zeros_like(self.ea_mean)
        return self.ea.std(axis=0, ddof=1) / np.sqrt(self.realizations)

    @property
    def ea_std(self) -> np.ndarray:
        if self.realizations < 2:
            return np.zeros_like(self.ea_mean)
        return self.ea.std(axis=0, ddof=1)


def sample_u1_gate(rng) -> np.ndarray:
    """Random two-qubit gate commuting with the pair's magnetization.

    Block structure in the basis {|00>, |01>, |10>, |11>}: uniform phases on
    the one-dimensional sectors, a Haar 2x2 unitary on the central block.
    The commutator with Z1 + Z2 vanishes exactly (structural zeros).
    """
    rng = as_rng(rng)
    gate = np.zeros((4, 4), dtype=complex)
    gate[0, 0] = np.exp(2j * np.pi * rng.random())
    gate[3, 3] = np.exp(2j * np.pi * rng.random())
    gate[1:3, 1:3] = haar_unitary(2, rng)
    return gate


def sample_layer_gates(n_sites: int, rng) -> list:
    """Fresh gates for one brickwork layer: (site, site, gate) triples on
    even bonds (0,1), (2,3), ... then odd bonds (1,2), ..., (N-1, 0)."""
    if n_sites % 2 != 0:
        raise ValueError("brickwork pairing needs an even number of sites")
    rng = as_rng(rng)
    gates = [(i, i + 1, sample_u1_gate(rng)) for i in range(0, n_sites, 2)]
    gates += [(i, (i + 1) % n_sites, sample_u1_gate(rng)) for i in range(1, n_sites, 2)]
    return gates


def apply_two_site_gate(
    amps: np.ndarray, n_sites: int, gate: np.ndarray, i: int, j: int
) -> np.ndarray:
    """Apply a 4x4 gate to sites (i, j) of an N-qubit amplitude vector.

    Fast paths cover the brickwork cases j = i+1 and the periodic wrap
    (N-1, 0); any other pair goes through a generic tensor contraction.
    """
    if j == i + 1:
        t = amps.reshape(2**i, 4, -1)
        return np.einsum("ab,pbq->paq", gate, t).reshape(-1)
    g4 = gate.reshape(2, 2, 2, 2)
    if (i, j) == (n_sites - 1, 0):
        t = amps.reshape(2, -1, 2)
        return np.einsum("abcd,dmc->bma", g4, t).reshape(-1)
    t = amps.reshape((2,) * n_sites)
    out = np.tensordot(g4, t, axes=[(2, 3), (i, j)])
    return np.moveaxis(out, (0, 1), (i, j)).reshape(-1)


def apply_brickwork_layer(state: CircuitState, rng) -> CircuitState:
    """One circuit layer with freshly sampled gates on every bond."""
    amps = state.amplitudes
    for i, j, gate in sample_layer_gates(state.n_sites, rng):
        amps = apply_two_site_gate(amps, state.n_sites, gate, i, j)
    return replace(state, amplitudes=amps, depth=state.depth + 1)


def tilting_unitary(theta: float) -> np.ndarray:
    """Single-site rotation exp(-i theta sigma_y / 2)."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def tilted_ferromagnet(n_sites: int, theta: float, epsilon: float, seed) -> CircuitState:
    """Product state of per-site tilting rotations applied to |0>.

    With epsilon > 0 each site gets its own independently perturbed rotation
    (QR projection of the tilting unitary plus epsilon times a Haar draw);
    epsilon = 0 reproduces the exact tilted ferromagnet.
    """
    if not 0.0 <= theta <= np.pi / 2:
        raise ValueError("tilting angle must lie in [0, pi/2]")
    rng = as_rng(seed)
    target = tilting_unitary(theta)
    amps = np.array([1.0 + 0j])
    for _ in range(n_sites):
        u = perturb_unitary(target, epsilon, rng) if epsilon > 0 else target
        amps = np.kron(amps, u[:, 0])
    return CircuitState(
        n_sites=n_sites, amplitudes=amps, depth=0, theta=theta, epsilon=epsilon
    )


def reduced_density(state: CircuitState, sites) -> np.ndarray:
    """Reduced density matrix of a contiguous block of sites.

    Traces out the complement of ``sites`` (an iterable of consecutive site
    indices, at most 8 sites).
    """
    sites = list(sites)
    k = len(sites)
    if k > MAX_SUBSYSTEM:
        raise ValueError(f"subsystem of {k} sites exceeds the supported {MAX_SUBSYSTEM}")
    if sites != list(range(sites[0], sites[0] + k)):
        raise ValueError("subsystem sites must be contiguous")
    n = state.n_sites
    t = state.amplitudes.reshape((2,) * n)
    first = sites[0]
    if first != 0:
        t = np.moveaxis(t, sites, range(k))
    m = t.reshape(2**k, -1)
    return m @ m.conj().T


def charge_decohere(rho: np.ndarray, table: ChargeSectorTable) -> np.ndarray:
    """Project a subsystem state onto block-diagonal form across charge
    sectors: rho_Q = sum_q P_q rho P_q. Idempotent and trace preserving."""
    rho = np.asarray(rho, dtype=complex)
    dim = 2**table.n_sites
    if rho.shape != (dim, dim):
        raise ValueError(f"state shape {rho.shape} does not match {table.n_sites} sites")
    q = table._charges
    return rho * (q[:, None] == q[None, :])


def _entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy in nats; eigenvalues clamped at zero."""
    vals = la.eigvalsh(rho)
    vals = vals[vals > 0.0]
    return float(-(vals * np.log(vals)).sum())


def entanglement_asymmetry(rho: np.ndarray, table: ChargeSectorTable) -> float:
    """S(rho_Q) - S(rho): zero iff the state is symmetric, else positive."""
    return _entropy(charge_decohere(rho, table)) - _entropy(np.asarray(rho, dtype=complex))


def sector_overlaps(rho: np.ndarray, table: ChargeSectorTable) -> tuple:
    """Charge-sector populations p_q = Tr[P_q rho P_q] and the weighted
    average sector dimension E[D] = sum_q p_q D_q."""
    rho = np.asarray(rho, dtype=complex)
    diag = np.real(np.diagonal(rho))
    probs = np.array([diag[mask].sum() for mask in table.masks])
    return probs, float(probs @ table.dims)


def run_ruc_experiment(
    n_sites: int,
    subsystem: int,
    theta: float,
    epsilon: float,
    depth: int,
    realizations: int,
    seed,
) -> RucTrajectory:
    """Ensemble-averaged entanglement asymmetry under circuit evolution.

    Each realization draws fresh preparation noise and a fresh circuit;
    the subsystem is the first ``subsystem`` sites. Returns the EA recorded
    after every layer (including depth 0) for all realizations, plus the
    mean initial charge-sector overlaps.
    """
    if realizations < 1:
        raise ValueError("need at least one realization")
    table = ChargeSectorTable(subsystem)
    block = range(subsystem)
    ea = np.zeros((realizations, depth + 1))
    pq = np.zeros(subsystem + 1)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    for r, child in enumerate(root.spawn(realizations)):
        prep_seed, circ_seed = child.spawn(2)
        state = tilted_ferromagnet(n_sites, theta, epsilon, as_rng(prep_seed))
        rho = reduced_density(state, block)
        ea[r, 0] = entanglement_asymmetry(rho, table)
        pq += sector_overlaps(rho, table)[0]
        circ_rng = as_rng(circ_seed)
        for d in range(1, depth + 1):
            state = apply_brickwork_layer(state, circ_rng)
            ea[r, d] = entanglement_asymmetry(reduced_density(state, block), table)
    return RucTrajectory(
        theta=theta,
        epsilon=epsilon,
        depths=np.arange(depth + 1),
        ea=ea,
        sector_probs=pq / realizations,
    )


def dimension_sweep(
    thetas, epsilons, preparations: int, seed, subsystem: int = 4
) -> list:
    """Mean weighted sector dimension of noisy tilted product states.

    For each (theta, epsilon) the E[D] of the ``subsystem``-site reduced
    initial state is averaged over ``preparations`` independent noise
    realizations. Returns rows (theta, epsilon, ed_mean, ed_stderr).
    """
    if preparations < 1:
        raise ValueError("need at least one preparation")
    table = ChargeSectorTable(subsystem)
    block = range(subsystem)
    rows = []
    for ti, theta in enumerate(thetas):
        for ei, eps in enumerate(epsilons):
            # each grid cell owns its stream: results are order-independent
            rng = as_rng(np.random.SeedSequence(seed, spawn_key=(ti, ei)))
            vals = np.empty(preparations)
            for k in range(preparations):
                state = tilted_ferromagnet(subsystem, theta, eps, rng)
                vals[k] = sector_overlaps(reduced_density(state, block), table)[1]
            stderr = (
                float(vals.std(ddof=1) / np.sqrt(preparations))
                if preparations > 1
                else 0.0
            )
            rows.append((float(theta), float(eps), float(vals.mean()), stderr))
    return rows
