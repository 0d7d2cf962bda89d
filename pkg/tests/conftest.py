import pytest

import sawenum as se
from sawenum import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile (or load from cache) once; keeps individual test timings honest
    _kernels.warmup()


@pytest.fixture(scope="session")
def reference_table():
    return se.reference_series()
