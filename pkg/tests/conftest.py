import os

import pytest


@pytest.fixture(scope="session", autouse=True)
def isolated_cache(tmp_path_factory):
    """Component tables are computed from scratch into a throwaway cache."""
    path = tmp_path_factory.mktemp("bqkz-cache")
    previous = os.environ.get("BQKZ_CACHE")
    os.environ["BQKZ_CACHE"] = str(path)
    yield path
    if previous is None:
        os.environ.pop("BQKZ_CACHE", None)
    else:
        os.environ["BQKZ_CACHE"] = previous


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
