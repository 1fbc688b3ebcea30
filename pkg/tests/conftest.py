import pytest

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(code, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    code, title = mark.args
    entry = _acceptance.setdefault(code, {"title": title, "ok": True, "ran": False})
    if rep.when == "call" or rep.failed:
        entry["ran"] = True
        entry["ok"] = entry["ok"] and not rep.failed


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for code in sorted(_acceptance, key=lambda c: int(c[2:])):
        e = _acceptance[code]
        verdict = ("PASS" if e["ok"] else "FAIL") if e["ran"] else "SKIP"
        terminalreporter.write_line(f"{code:<5} {verdict}  {e['title']}")


@pytest.fixture
def node():
    from cbf.model import FibrationModel
    return FibrationModel.build([[1], [1]])


@pytest.fixture
def double_fiber():
    from cbf.model import FibrationModel
    return FibrationModel.build([[2], [0]])


@pytest.fixture
def two_base():
    from cbf.model import FibrationModel
    return FibrationModel.build([[1, 0], [0, 1], [0, 2]], r={"w3": "1/4"})
