import os
import sys

import numpy as np
import pytest

from dpmix import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


def leukemia_path():
    path = os.environ.get("DPMIX_LEUKEMIA")
    return path if path and os.path.exists(path) else None


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
