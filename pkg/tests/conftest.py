import time

import numpy as np
import pytest

from mpemba_lab import (
    DickeParams,
    OscillatorParams,
    build_liouvillian,
    decompose,
    dicke_model,
    oscillator_model,
)


class TimedDecomposition:
    """Decomposition plus the wall time it took to build (for the runtime
    budget of the crossing criterion)."""

    def __init__(self, dec, build_seconds):
        self.dec = dec
        self.build_seconds = build_seconds


@pytest.fixture(scope="session")
def dicke40():
    t0 = time.perf_counter()
    dec = decompose(build_liouvillian(dicke_model(DickeParams(n_spins=40))))
    return TimedDecomposition(dec, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def sho25():
    model = oscillator_model(OscillatorParams(dim=25, omega0=1.0, gamma=1.0, nbar=1.0))
    return decompose(build_liouvillian(model))


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
