import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cqad.config import reference_config  # noqa: E402
from cqad.phonon_idt import IdtParams, QubitEnvironment  # noqa: E402
from cqad.transmon import TransmonParams  # noqa: E402


@pytest.fixture(scope="session")
def ref():
    return reference_config()


@pytest.fixture
def idt():
    return IdtParams(8, 4.24e9, 9.04e-9, 11e6, 5.1e6)


@pytest.fixture
def env():
    return QubitEnvironment(1.2e4)


@pytest.fixture
def transmon():
    return TransmonParams(5.718e9, 0.14, 1.168e-3, 79.2e-6)
