import pytest

from artifact.gas_model import GasLaw


@pytest.fixture
def law():
    """gamma = 2, k0 = 1/2, so c = sqrt(rho)."""
    return GasLaw(2.0, 0.5)
