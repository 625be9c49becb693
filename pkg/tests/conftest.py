from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
    deadline=None,
)
settings.load_profile("suite")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # one visible line per acceptance criterion, regardless of capture mode
    try:
        from test_acceptance import CRITERION_LINES
    except ImportError:
        return
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERION_LINES:
        terminalreporter.write_line(line)
