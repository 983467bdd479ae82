import pytest


def pytest_addoption(parser):
    parser.addoption("--ppl-lab", action="store", required=True, help="path to the ppl_lab binary")


@pytest.fixture(scope="session")
def ppl_lab(request):
    return request.config.getoption("--ppl-lab")
