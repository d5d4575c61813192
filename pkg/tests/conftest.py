import sys
from pathlib import Path

import pytest

from mereocheck.model import load_structure

DATA = Path(__file__).parent / "data"
GOLDENS = Path(__file__).parent / "goldens"


@pytest.fixture(scope="session")
def m1():
    return load_structure(DATA / "m1.json")


@pytest.fixture(scope="session")
def m1f():
    return load_structure(DATA / "m1f.json")


@pytest.fixture(scope="session")
def m2f():
    return load_structure(DATA / "m2f.json")


@pytest.fixture(scope="session")
def m3():
    return load_structure(DATA / "m3.json")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS.values():
        terminalreporter.write_line(line)
