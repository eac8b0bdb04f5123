import functools
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from veerwall.sigparse import read_census  # noqa: E402
from veerwall.triangulation import VeeringTriangulation  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "data")


def data_path(name):
    return os.path.join(DATA, name)


@functools.lru_cache(maxsize=None)
def corpus(name):
    with open(data_path(name)) as fh:
        return tuple(read_census(fh))


def upto8():
    return corpus("census_upto8.txt")


def all_fixtures():
    return upto8() + corpus("census_9to12_sample.txt")


@functools.lru_cache(maxsize=None)
def triangulation(sig, flip=False):
    return VeeringTriangulation.from_signature(sig, flip=flip)


@pytest.fixture(scope="session")
def fixtures():
    return all_fixtures()


PAPER_EXAMPLES = {
    "cPcbbbdxm_10": True,
    "gLLAQbddeeffennmann_011200": True,
    "eLAkbbcdddhwqj_2102": False,
    "fLAMcaccdeejsnaxk_20010": False,
}


# criterion number -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
