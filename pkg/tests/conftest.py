import pytest

CRITERIA: dict[int, tuple[str, list]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    _, results = CRITERIA.setdefault(number, (title, []))
    details = [f"{k}={v}" for k, v in item.user_properties]
    results.append((report.passed, details))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        title, results = CRITERIA[number]
        status = "PASS" if all(ok for ok, _ in results) else "FAIL"
        details = "; ".join(d for _, ds in results for d in ds)
        terminalreporter.write_line(f"{status} criterion {number}: {title}"
                                    + (f" ({details})" if details else ""))
