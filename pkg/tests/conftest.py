import pytest

from pingcert.cli.common import BUNDLED
from pingcert.services.cayley import build_ball
from pingcert.services.presentation import WordOracle, load_presentation


def bundled_oracle(name: str) -> WordOracle:
    return WordOracle(load_presentation(BUNDLED / f"{name}.grp"))


@pytest.fixture(scope="session")
def f1():
    return bundled_oracle("f1")


@pytest.fixture(scope="session")
def f2():
    return bundled_oracle("f2")


@pytest.fixture(scope="session")
def f3():
    return bundled_oracle("f3")


@pytest.fixture(scope="session")
def z2():
    return bundled_oracle("z2")


@pytest.fixture(scope="session")
def genus2():
    return bundled_oracle("genus2")


@pytest.fixture(scope="session")
def f2_ball6(f2):
    return build_ball(f2, 6)


@pytest.fixture(scope="session")
def z2_ball6(z2):
    return build_ball(z2, 6)


@pytest.fixture(scope="session")
def genus2_ball3(genus2):
    return build_ball(genus2, 3)
