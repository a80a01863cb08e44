from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=150,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> list of (test name, outcome, note)
_criteria = {}
_marks = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion n")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _marks[item.nodeid] = m.args[0]


def pytest_runtest_logreport(report):
    n = _marks.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        if hasattr(report, "wasxfail"):
            outcome = "xfailed" if report.skipped else "xpassed"
            note = report.wasxfail.removeprefix("reason: ")
        else:
            outcome, note = report.outcome, ""
        _criteria.setdefault(n, []).append((report.nodeid.split("::")[-1], outcome, note))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        bad = [r for r in results if r[1] != "passed"]
        if not bad:
            tr.write_line(f"criterion {n:2d}: PASS ({len(results)} tests)")
        else:
            why = "; ".join(f"{name} {out}" + (f": {note}" if note else "") for name, out, note in bad)
            tr.write_line(f"criterion {n:2d}: FAIL ({why})")
