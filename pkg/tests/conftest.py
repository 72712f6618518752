import pathlib

import pytest

from fisolve import dsl, solvers

ROOT = pathlib.Path(__file__).resolve().parent.parent
GAMES = ROOT / "games"


def read(name):
    return (GAMES / name).read_text()


@pytest.fixture(scope="session")
def bribe():
    return dsl.parse_game(read("bribe.game"))


@pytest.fixture(scope="session")
def cleo():
    return dsl.parse_game(read("cleo.game"))


@pytest.fixture(scope="session")
def bribe_delta(bribe):
    return dsl.parse_restrictions(read("bribe_report.beliefs"), bribe)


@pytest.fixture(scope="session")
def cleo_nw(cleo):
    return dsl.parse_restrictions(read("cleo_nw.beliefs"), cleo)


@pytest.fixture(scope="session")
def cleo_se(cleo):
    return dsl.parse_restrictions(read("cleo_se_path.beliefs"), cleo)


@pytest.fixture(scope="session")
def bribe_base(bribe):
    return solvers.rationalizability(bribe)


@pytest.fixture(scope="session")
def cleo_base(cleo):
    return solvers.rationalizability(cleo)


def names(pset, player):
    return sorted(s.name for s in pset.strategies(player))
