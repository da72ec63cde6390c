import pytest

from liquidtally import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT-compile once so timing assertions measure steady state
    kernels.warm_up()
