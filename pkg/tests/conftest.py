import pytest

from invlearn import DemandGrid, GameParams, PlayerParams, example1


@pytest.fixture(scope="session")
def ex1():
    return example1()


def make_game(alpha1=1.0, alpha2=1.0, c1=2.0, c2=1.0, delta=0.01, r=4.0, h=0.6, upper=1.0):
    return GameParams(
        PlayerParams(r, h, c1, alpha1),
        PlayerParams(r, h, c2, alpha2),
        DemandGrid.uniform(upper, delta),
        DemandGrid.uniform(upper, delta),
    )


@pytest.fixture
def game_factory():
    return make_game


@pytest.fixture(scope="session")
def acceptance_batch(tmp_path_factory):
    """The shipped config over its 20 seeds at 500 stages, run once per session.

    Every start-of-stage belief is kept in memory for the hygiene checks.
    """
    from dataclasses import replace

    from invlearn.experiment import parse_config, run_experiment_batch

    out = tmp_path_factory.mktemp("acceptance")
    cfg = replace(parse_config("example1").with_overrides(output=out), snapshots="all")
    return run_experiment_batch(cfg, keep_trajectories=True, write_beliefs=False)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
