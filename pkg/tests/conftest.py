import pathlib
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from synth import write_covid_csv  # noqa: E402

settings.register_profile("pfb", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pfb")


@pytest.fixture(scope="session")
def covid_csv(tmp_path_factory):
    return write_covid_csv(tmp_path_factory.mktemp("data") / "us.csv")


@pytest.fixture(scope="session")
def deaths(covid_csv):
    from pfb.ingest import extract_series, parse_csv
    return extract_series(parse_csv(covid_csv), "deathIncrease", 44)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
