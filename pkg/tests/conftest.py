import math
from fractions import Fraction

import pytest

from dirwalk.exactlaw import WalkConfig
from dirwalk.specfun import pochhammer
from dirwalk.transform import walk_taylor_coeffs


def transform_moments(config: WalkConfig, order: int) -> list:
    """``E(R^(2k))`` read off the Taylor series of the product-form transform.

    Independent of every law pipeline: it only expands the product of 2F1
    factors and divides out the known coefficient of each even moment.
    """
    coeffs = walk_taylor_coeffs(config, order)
    Q, half_d = Fraction(config.Q), Fraction(config.d, 2)
    return [c * math.factorial(2 * k) * pochhammer(half_d, k) / (pochhammer(Q, 2 * k) * pochhammer(Fraction(1, 2), k))
            for k, c in enumerate(coeffs)]


@pytest.fixture
def moment_oracle():
    return transform_moments


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion and print it."""

    def record(number, title, passed, detail=""):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
