import pytest

from clustersim import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # jit compilation is a one-time toolchain cost; pay it before any test
    # that carries a runtime budget
    kernels.warmup()
