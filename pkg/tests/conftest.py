import time

import pytest

from ontodm.pipeline import run_pipeline

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    n, title = marker.args
    _criteria[n] = (title, report.passed, getattr(item, "criterion_detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, ok, detail = _criteria[n]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def detail(request):
    """Store a short measurement next to the criterion's pass/fail line."""
    def put(text):
        request.node.criterion_detail = text
        print(text)
    return put


@pytest.fixture(scope="session")
def fixture_run(tmp_path_factory):
    """The bundled project run once end to end; shared by the slower tests."""
    out = tmp_path_factory.mktemp("pipeline")
    t0 = time.perf_counter()
    result = run_pipeline(None, out)
    result.summary["wall_seconds"] = time.perf_counter() - t0
    return result
