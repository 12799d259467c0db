import numpy as np
import pytest

from nondivhom import constructions as cons


@pytest.fixture
def announce(capsys):
    """Print one status line straight to the terminal, bypassing capture."""

    def _say(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return _say


@pytest.fixture(scope="session")
def st_entry():
    return cons.gallery("st_2d")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
