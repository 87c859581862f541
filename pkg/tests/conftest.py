import pytest

from bbdipole.polarizability import DielectricSphere, Electron, TwoLevelAtom
from bbdipole.verification import reference_electron, reference_sphere


@pytest.fixture(scope="session")
def electron() -> Electron:
    return reference_electron()


@pytest.fixture(scope="session")
def sphere() -> DielectricSphere:
    return reference_sphere()


@pytest.fixture(scope="session")
def atom() -> TwoLevelAtom:
    # mid-infrared transition, Debye-scale dipole, narrow line
    return TwoLevelAtom(omega0=2e14, mu=1e-18, beta=1e8, mass=1e-22)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
