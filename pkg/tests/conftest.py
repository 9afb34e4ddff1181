import pytest

_AC_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "ac(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("ac")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        num, title = marker.args
        detail = ""
        if rep.failed and call.excinfo is not None:
            detail = str(call.excinfo.value).strip().splitlines()[0][:300]
        _AC_RESULTS[num] = (title, "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _AC_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_AC_RESULTS):
        title, status, detail = _AC_RESULTS[num]
        line = f"AC{num} {status}: {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
