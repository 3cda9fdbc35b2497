from hypothesis import settings

# fixed seeds keep the suite reproducible and its runtime predictable
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n, line in sorted(lines):
        terminalreporter.write_line(line)
