"""Distance-from-equilibrium trajectories, thermalization times and
error-degradation sweeps.

The distance is always the Hilbert-Schmidt distance of the propagated state
from the steady state, evaluated through the full mode sum
||sum_{a>=2} exp(l_a t) c_a R_a||. No orthonormality of the right modes is
assumed: the generator is non-normal and the cross terms matter, so the
(cheaper) diagonal formula sum exp(2 Re l_a t) |c_a|^2 is deliberately not
used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_rng
from .liouville import (
    LindbladModel,
    SpectralDecomposition,
    build_liouvillian,
    decompose,
    overlap_coefficients,
    relaxation_timescales,
)
from .stateprep import (
    PreparationError,
    apply_rotation,
    build_rotation,
    diagonalizing_unitary,
    perturb_unitary,
    random_state_vector,
)

__all__ = [
    "HorizonExceededError",
    "DegenerateBaselineError",
    "ThermalizationCurve",
    "SweepResult",
    "hs_distance",
    "distance_from_coefficients",
    "distance_profile",
    "thermalization_time",
    "relative_speedup",
    "run_epsilon_sweep",
]


class HorizonExceededError(RuntimeError):
    """The distance never dropped below the threshold within the horizon."""


class DegenerateBaselineError(ValueError):
    """Baseline and ideal thermalization times coincide; speed-up undefined."""


@dataclass
class ThermalizationCurve:
    """A labelled distance-from-equilibrium trajectory."""

    times: np.ndarray
    distances: np.ndarray
    label: str


@dataclass
class SweepResult:
    """Rows of an error-degradation sweep, one per (seed, eta, epsilon)."""

    model: str
    size: int
    etas: list
    epsilons: list
    seeds: list
    rows: list = field(default_factory=list)  # (seed, eta, epsilon, t_eq, speedup)

    def speedup_vs_epsilon(self, eta: float) -> tuple:
        """Seed-averaged speed-up on the epsilon grid at one threshold."""
        eps = np.asarray(self.epsilons, dtype=float)
        out = np.empty_like(eps)
        for i, e in enumerate(eps):
            vals = [r[4] for r in self.rows if r[1] == eta and r[2] == e]
            out[i] = float(np.mean(vals))
        return eps, out

    def teq_vs_epsilon(self, eta: float) -> tuple:
        """Seed-averaged thermalization time on the epsilon grid."""
        eps = np.asarray(self.epsilons, dtype=float)
        out = np.empty_like(eps)
        for i, e in enumerate(eps):
            vals = [r[3] for r in self.rows if r[1] == eta and r[2] == e]
            out[i] = float(np.mean(vals))
        return eps, out


def hs_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Hilbert-Schmidt distance sqrt(Tr[(rho-sigma)^dag (rho-sigma)])."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    return float(np.linalg.norm(rho - sigma))


def distance_from_coefficients(
    dec: SpectralDecomposition, coeffs: np.ndarray, t: float
) -> float:
    """Distance from the steady state at time ``t`` from mode coefficients.

    Equals hs_distance(propagate(dec, rho0, t), steady_state) to rounding.
    """
    weights = coeffs[1:] * np.exp(dec.eigenvalues[1:] * t)
    return float(np.linalg.norm(dec.right[:, 1:] @ weights))


def distance_profile(
    dec: SpectralDecomposition, coeffs: np.ndarray, times: np.ndarray
) -> np.ndarray:
    """Vectorized :func:`distance_from_coefficients` over a time grid."""
    times = np.asarray(times, dtype=float)
    ew = np.exp(np.outer(dec.eigenvalues[1:], times))
    v = (dec.right[:, 1:] * coeffs[1:]) @ ew
    return np.linalg.norm(v, axis=0)


def _last_crossing_grid(dec, coeffs, eta, horizon_factor, grid_points):
    tau2, _ = relaxation_timescales(dec)
    horizon = horizon_factor * tau2
    grid = np.concatenate([[0.0], np.geomspace(1e-3 * tau2, horizon, grid_points)])
    dist = distance_profile(dec, coeffs, grid)
    return grid, dist


def thermalization_time(
    dec: SpectralDecomposition,
    coeffs: np.ndarray,
    eta: float,
    horizon_factor: float = 20.0,
    grid_points: int = 800,
) -> float:
    """Last time the distance from equilibrium crosses ``eta`` from above.

    The distance can be non-monotone (oscillatory modes), so "reaching"
    eta is read as permanently entering the eta-ball: a geometric grid scan
    out to ``horizon_factor * tau_2`` locates the final bracketing interval,
    then bisection refines to relative tolerance 1e-6. Returns 0 when the
    initial distance is already at or below eta.

    Raises
    ------
    HorizonExceededError
        If the distance is still above eta at the end of the horizon.
    """
    if eta <= 0:
        raise ValueError("threshold must be positive")
    grid, dist = _last_crossing_grid(dec, coeffs, eta, horizon_factor, grid_points)
    return _refine_last_crossing(dec, coeffs, eta, grid, dist)


def _refine_last_crossing(dec, coeffs, eta, grid, dist):
    if dist[0] <= eta:
        return 0.0
    if dist[-1] > eta:
        raise HorizonExceededError(
            f"distance {dist[-1]:.3e} still above eta={eta:.3e} at t={grid[-1]:.3g}"
        )
    above = np.flatnonzero(dist > eta)
    i = above[-1]  # dist[i] > eta >= dist[i+1]
    lo, hi = grid[i], grid[i + 1]
    f_lo = dist[i]
    while hi - lo > 1e-6 * max(hi, 1.0):
        mid = 0.5 * (lo + hi)
        f_mid = distance_from_coefficients(dec, coeffs, mid)
        if f_mid > eta:
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _teq_multi(dec, coeffs, etas, horizon_factor=20.0, grid_points=800):
    """Thermalization times for several thresholds from one grid profile."""
    grid, dist = _last_crossing_grid(dec, coeffs, min(etas), horizon_factor, grid_points)
    return {eta: _refine_last_crossing(dec, coeffs, eta, grid, dist) for eta in etas}


def relative_speedup(t_base: float, t_ideal: float, t_eps: float) -> float:
    """Percentage of the ideal thermalization speed-up retained at t_eps.

    100 * (t_base - t_eps) / (t_base - t_ideal), clamped to [0, 100]:
    t_eps = t_ideal keeps the full speed-up (100%), t_eps = t_base none (0%).
    """
    if t_base < t_ideal:
        raise ValueError("baseline time must not be smaller than the ideal time")
    if t_base - t_ideal <= 1e-12 * max(abs(t_base), 1.0):
        raise DegenerateBaselineError(
            "baseline equals ideal thermalization time; speed-up undefined"
        )
    return float(np.clip(100.0 * (t_base - t_eps) / (t_base - t_ideal), 0.0, 100.0))


def run_epsilon_sweep(
    model: LindbladModel,
    prep: str,
    epsilons,
    etas,
    seeds,
    state_support: int = None,
    label: str = "model",
    size: int = None,
    dec: SpectralDecomposition = None,
) -> SweepResult:
    """Thermalization-time degradation under preparation error.

    For each seed a Haar-random pure state (optionally supported on the
    lowest ``state_support`` levels) provides the baseline; the exact
    preparation (``prep`` = "angle": orthogonalizing rotation; "qr":
    diagonalization) provides the ideal time; each epsilon in the grid
    yields one noisy preparation and one row per threshold eta. For "qr"
    the perturbation direction is drawn once per seed and shared across the
    epsilon grid, so t_eq(eps) is a noise-free curve along one direction.

    A precomputed decomposition of the model's generator may be passed to
    avoid repeating the (expensive) eigensolve.
    """
    if prep not in ("angle", "qr"):
        raise ValueError(f"unknown preparation kind {prep!r}")
    if dec is None:
        dec = decompose(build_liouvillian(model))
    d = model.dim
    result = SweepResult(
        model=label,
        size=size if size is not None else d,
        etas=list(etas),
        epsilons=[float(e) for e in epsilons],
        seeds=list(seeds),
    )

    for seed in seeds:
        ss = np.random.SeedSequence(seed)
        state_seed, noise_seed = ss.spawn(2)
        psi = random_state_vector(d, as_rng(state_seed), support=state_support)
        rho0 = np.outer(psi, psi.conj())
        c_base = overlap_coefficients(dec, rho0)

        if prep == "angle":
            rot = build_rotation(dec, psi)

            def prepare(eps):
                return apply_rotation(rot, rho0, PreparationError(eps, "angle-relative"))
        else:
            u_target = diagonalizing_unitary(rho0)

            def prepare(eps):
                if eps == 0.0:
                    u = u_target
                else:
                    # same noise direction across the grid: reseed per call
                    u = perturb_unitary(u_target, eps, np.random.default_rng(noise_seed))
                return u.conj().T @ rho0 @ u

        c_ideal = overlap_coefficients(dec, prepare(0.0))
        t_base = _teq_multi(dec, c_base, result.etas)
        t_ideal = _teq_multi(dec, c_ideal, result.etas)
        for eps in result.epsilons:
            if eps == 0.0:
                t_eps = t_ideal
            else:
                c_eps = overlap_coefficients(dec, prepare(eps))
                t_eps = _teq_multi(dec, c_eps, result.etas)
            for eta in result.etas:
                result.rows.append(
                    (
                        seed,
                        eta,
                        eps,
                        t_eps[eta],
                        relative_speedup(t_base[eta], t_ideal[eta], t_eps[eta]),
                    )
                )
    return result
