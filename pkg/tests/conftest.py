import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hhlflow.svsim import backend

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(params=backend.available())
def kernels(request):
    """Each available kernel backend module."""
    return backend.get(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(n, rng):
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return psi / np.linalg.norm(psi)


def random_unitary(dim, rng):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# acceptance verdicts, printed once at the end of the session
ACCEPTANCE = {}


def record_acceptance(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"{key}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key:<28} {'PASS' if ok else 'FAIL'}  {detail}")
