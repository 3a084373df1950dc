import pytest

from dynabuf import DescriptorPool, bundled_pool


@pytest.fixture(scope="session")
def pool() -> DescriptorPool:
    return bundled_pool()


@pytest.fixture(scope="session")
def person(pool):
    return pool.lookup("tutorial.Person")


@pytest.fixture(scope="session")
def everything():
    from support import everything_pool
    return everything_pool().lookup("testing.Everything")


# One visible pass/fail line per acceptance criterion at the end of a run.

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1],
                                    report.outcome.upper()))
    elif (report.when == "setup" and report.skipped
          and "test_acceptance.py" in report.nodeid):
        _acceptance_results.append((report.nodeid.split("::")[-1], "SKIPPED"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_results:
        label = "PASS" if outcome == "PASSED" else outcome
        terminalreporter.write_line(f"{label:<8} {name}")
