import pytest

from mvadder import _kernel


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the simulation kernels once so timed tests measure the
    model, not the JIT."""
    _kernel.warm_up()
