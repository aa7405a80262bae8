import cmath
import math

import numpy as np
import pytest

from duality_sim import SourceState


def random_state(rng: np.random.Generator) -> SourceState:
    p_a = rng.uniform()
    mixing = rng.uniform()
    bound = math.sqrt(p_a * (1.0 - p_a))
    return SourceState(p_a, 1.0 - p_a, cmath.rect(mixing * bound, rng.uniform(-math.pi, math.pi)))


def random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20181026)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")
