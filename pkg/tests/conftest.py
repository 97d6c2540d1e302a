import pytest

from pooltile import _kernels

BACKENDS = [pytest.param(_kernels.python, id="python")]
if _kernels.compiled is not None:
    BACKENDS.append(pytest.param(_kernels.compiled, id="compiled"))


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def use_backend(monkeypatch):
    """Route the high-level modules through one specific backend."""

    def _use(mod):
        for name in ("apply_pauli", "apply_rotation", "apply_pauli_sum", "expectation",
                     "pool_gradients", "ansatz_state", "energy_and_gradient", "closure"):
            monkeypatch.setattr(_kernels, name, getattr(mod, name))

    return _use
