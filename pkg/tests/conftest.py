import numpy as np
import pytest

from blockmark.synth import textured_image


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def textured():
    return textured_image(3)


@pytest.fixture(scope="session")
def textured_set():
    return [textured_image(seed) for seed in range(4)]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(RESULTS, key=lambda c: int(c[1:])):
        status, detail = RESULTS[cid]
        terminalreporter.write_line(f"{cid:>4} {status:<4} {detail}")
