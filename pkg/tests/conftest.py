import numpy as np
import pytest

from raimsim.atomcore import QuantumDefectTable


@pytest.fixture(scope="session")
def rb87():
    return QuantumDefectTable.bundled("Rb87")


@pytest.fixture(scope="session")
def hydrogen():
    # all channels hydrogenic (delta = 0)
    return QuantumDefectTable(species="H", n_min=1, channels={})


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
