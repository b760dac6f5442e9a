"""Shared fixtures and the acceptance summary printed at the end of every run."""

import pytest
from hypothesis import settings

settings.register_profile('default', max_examples=60, deadline=None)
settings.load_profile('default')

_ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if 'criterion' not in props:
        return
    cid = props['criterion']
    if report.when == 'call' or (report.when == 'setup' and report.outcome != 'passed'):
        _ACCEPTANCE[cid] = (props.get('title', ''), report.outcome == 'passed', props.get('detail', ''))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section('acceptance criteria')
    for cid in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[cid]
        line = f"criterion {cid}: {'PASS' if ok else 'FAIL'} - {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(12345)
