import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from arthurs_kelly.gaussian import GaussianProbeParams, GaussianSystemParams

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


reals = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)


@st.composite
def probes(draw, separable=False):
    ar = draw(st.floats(0.3, 3.0))
    br = draw(st.floats(0.3, 3.0))
    rho = 0.0 if separable else draw(st.floats(-0.9, 0.9))
    ci = 0.0 if separable else draw(reals)
    return GaussianProbeParams(
        complex(ar, draw(reals)),
        complex(br, draw(reals)),
        complex(rho * np.sqrt(ar * br), ci),
        complex(draw(reals), draw(reals)),
        complex(draw(reals), draw(reals)),
    )


@st.composite
def systems(draw):
    return GaussianSystemParams(
        complex(draw(st.floats(0.3, 3.0)), draw(reals)),
        complex(draw(reals), draw(reals)),
    )
