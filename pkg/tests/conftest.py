import pytest

from kronfib.linalg import FieldSpec


@pytest.fixture
def fp():
    return FieldSpec.fp()


@pytest.fixture
def qq():
    return FieldSpec.rationals()
