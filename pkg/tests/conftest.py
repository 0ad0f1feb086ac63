import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def quadratic_survey(tmp_path_factory):
    """Full (4, 2) survey, run once per session: (sink path, reports)."""
    from portrait_lab.survey import read_reports, run_survey

    sink = tmp_path_factory.mktemp("survey") / "quadratic.jsonl"
    run_survey(4, 2, sink, jobs=1, timing=False)
    return sink, read_reports(sink)


_ACCEPTANCE = pytest.StashKey[dict]()


class AcceptanceRecorder:
    """Collects per-criterion outcomes; a criterion passes only if all its parts pass."""

    def __init__(self, store: dict):
        self.store = store

    def record(self, criterion: int, ok: bool, detail: str) -> None:
        self.store.setdefault(criterion, []).append((ok, detail))


@pytest.fixture(scope="session")
def acceptance(request):
    return AcceptanceRecorder(request.config.stash.setdefault(_ACCEPTANCE, {}))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(results):
        parts = results[criterion]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"{status} criterion {criterion}: {detail}")
