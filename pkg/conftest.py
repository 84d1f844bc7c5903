import pytest
from hypothesis import Phase, settings

settings.register_profile("pre-push", deadline=None, phases=[Phase.generate])


def pytest_addoption(parser):
    parser.addoption(
        "--regen-goldens",
        action="store_true",
        default=False,
        help="rewrite the CLI golden reports instead of comparing against them",
    )


@pytest.fixture(scope="session")
def regen_goldens(request):
    return request.config.getoption("--regen-goldens")
