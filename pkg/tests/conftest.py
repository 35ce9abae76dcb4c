import pytest

_RESULTS = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(item.user_properties).get("detail", "")
        if report.outcome != "passed" and not detail and call.excinfo is not None:
            detail = call.excinfo.exconly().splitlines()[0][:120]
        _RESULTS.append((marker.args[0], marker.args[1], report.outcome == "passed", detail))


def _order(cid):
    digits = "".join(c for c in cid if c.isdigit())
    return int(digits or 0), cid


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid, text, passed, detail in sorted(_RESULTS, key=lambda r: _order(r[0])):
        line = f"[{'PASS' if passed else 'FAIL'}] {cid:<4} {text}"
        if detail:
            line += f" | {detail}"
        tr.write_line(line)
    n_pass = sum(r[2] for r in _RESULTS)
    tr.write_line(f"{n_pass}/{len(_RESULTS)} acceptance lines passed")
