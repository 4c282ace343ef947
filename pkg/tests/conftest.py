import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    results = item.config.stash.setdefault(_RESULTS, {})
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = ""
        if report.failed and call.excinfo is not None:
            detail = str(call.excinfo.value).splitlines()[0] if str(call.excinfo.value) else call.excinfo.typename
        status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        results[item.nodeid] = (marker.args[0], status, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, detail in results.values():
        line = f"{status}  criterion {label}"
        if detail and status != "PASS":
            line += f"  ({detail})"
        terminalreporter.write_line(line)
