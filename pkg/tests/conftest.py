import re

import numpy as np
import pytest

from labelloop.data import make_rng


@pytest.fixture
def rng():
    return make_rng(12345)


def random_simplex(rng, n, k):
    """n random probability vectors of length k (Dirichlet-uniform)."""
    raw = rng.gamma(1.0, 1.0, size=(n, k))
    return raw / raw.sum(axis=1, keepdims=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One verdict line per acceptance criterion."""
    verdicts = []
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            match = re.match(r"test_(a\d+)(_.*)?", name)
            if match:
                verdicts.append((match.group(1).upper(), label, name))
    if verdicts:
        terminalreporter.write_sep("=", "acceptance criteria")
        for criterion, label, name in sorted(verdicts):
            terminalreporter.write_line(f"{criterion} {label}  ({name})")
