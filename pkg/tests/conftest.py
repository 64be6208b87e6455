import pytest

from escalier import Interval, zoo_lookup

_RESULTS = {}


@pytest.fixture
def f1():
    return zoo_lookup("f1")


@pytest.fixture
def unit():
    return Interval(0.0, 2.0)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    entry = _RESULTS.setdefault(number, {"title": title, "passed": 0, "failed": 0, "failures": []})
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        if rep.passed:
            entry["passed"] += 1
        elif rep.failed:
            entry["failed"] += 1
            entry["failures"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        e = _RESULTS[number]
        status = "PASS" if e["failed"] == 0 and e["passed"] > 0 else "FAIL"
        line = f"criterion {number}: {status}  {e['title']}  ({e['passed']} passed, {e['failed']} failed)"
        if e["failures"]:
            line += "  failing: " + ", ".join(e["failures"])
        tr.write_line(line)
