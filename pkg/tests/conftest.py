import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from schlab import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the hot loops once so timed tests measure compute, not numba
    _kernels.warm_up()
