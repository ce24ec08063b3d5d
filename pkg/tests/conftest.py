import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stieltjes.orthopoly import PolynomialFamily  # noqa: E402

ACCEPTANCE_LINES = []

FAMILIES = [
    PolynomialFamily.hermite(),
    PolynomialFamily.laguerre(0),
    PolynomialFamily.laguerre(1),
    PolynomialFamily.laguerre(2.5),
    PolynomialFamily.jacobi(0.6, 0.6),
    PolynomialFamily.jacobi(1, 1),
    PolynomialFamily.jacobi(1, 2),
]


@pytest.fixture(params=FAMILIES, ids=lambda f: f.label)
def family(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
