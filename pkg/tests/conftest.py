import pytest

from pdcsim import reference_params, scaled_params


@pytest.fixture
def ref_params():
    """The 5.5 GHz flux-qubit design point."""
    return reference_params()


@pytest.fixture
def desk_params():
    """Desk-scale parameters with chi = 0.2 gamma_b and gamma_a = 2 gamma_b."""
    return scaled_params()
