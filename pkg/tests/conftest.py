acceptance_lines = []


def record_acceptance(criterion, name, passed):
    """Collect one pass/fail line per acceptance criterion for the summary."""
    status = "PASS" if passed else "FAIL"
    line = f"[acceptance {criterion}] {name}: {status}"
    acceptance_lines.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
