from __future__ import annotations


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                rows.append((props["criterion"], outcome == "passed"))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for text, ok in sorted(rows):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {text}")
    passed = sum(ok for _, ok in rows)
    terminalreporter.write_line(f"{passed}/{len(rows)} criteria checks passed")
