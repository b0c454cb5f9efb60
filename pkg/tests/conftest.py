import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cargobook.instance import InstanceSpec, build_family  # noqa: E402


def micro_spec(**overrides) -> InstanceSpec:
    """n=1, T=1 instance: no request w.p. 0.1, location at (1,0), depot at the origin."""
    params = dict(n=1, T=1, revenues=(10.0,), lambda0=0.1, lambda_init=(0.9,), lambda_drift=(0.0,),
                  coords=((1.0, 0.0),), depot=(0.0, 0.0), K0=1, C=100.0, LF=1.0, Q=1)
    params.update(overrides)
    return InstanceSpec(**params)


def random_micro(rng: np.random.Generator, n_max=2, T_max=4) -> InstanceSpec:
    n = int(rng.integers(1, n_max + 1))
    T = int(rng.integers(1, T_max + 1))
    return InstanceSpec(
        n=n, T=T,
        revenues=tuple(rng.uniform(1, 20, n).round(2)),
        lambda0=float(rng.uniform(0.05, 0.5)),
        lambda_init=tuple(rng.uniform(0.1, 1.0, n)),
        lambda_drift=tuple(rng.uniform(-0.02, 0.02, n)),
        coords=[tuple(c) for c in rng.uniform(0, 10, (n, 2))],
        depot=tuple(rng.uniform(0, 10, 2)),
        K0=1, C=float(rng.uniform(5, 50)), LF=1.0, Q=int(rng.integers(1, 3)),
    )


def force_revenues(spec: InstanceSpec, values) -> InstanceSpec:
    """Bypass validation to build a zero-revenue spec for degenerate checks."""
    object.__setattr__(spec, "revenues", tuple(float(v) for v in values))
    return spec


@pytest.fixture(scope="session")
def f4():
    return build_family(4, 0)


@pytest.fixture(scope="session")
def f10():
    return build_family(10, 0)


@pytest.fixture
def micro():
    return micro_spec()


# lines reported by test_acceptance.py, echoed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
