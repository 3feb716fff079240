import pytest

from gkg import parse_gkg

from .support import WORKED_TEXT, BasisProvider


@pytest.fixture
def worked_doc():
    return parse_gkg(WORKED_TEXT)


@pytest.fixture
def basis():
    return BasisProvider()
