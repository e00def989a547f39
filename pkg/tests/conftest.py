import pytest

from cpldamp.plant import PlantParams


@pytest.fixture
def params():
    return PlantParams.reference()
