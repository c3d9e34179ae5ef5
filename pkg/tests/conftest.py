import random

import pytest

from koszul_lab.fields import QQ, extension_field, prime_field

FIELDS = [QQ, prime_field(2), prime_field(5), prime_field(7), extension_field(5, [2, 0, 1])]


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(params=FIELDS, ids=str)
def field(request):
    return request.param


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
