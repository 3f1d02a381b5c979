import math

import numpy as np
from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

# distinct points stay >= 1e-6 apart; merging handles anything closer
coord = (st.integers(-1000, 1000).map(float)
         | st.floats(-1000.0, 1000.0, allow_nan=False).map(lambda x: round(x, 6)))
point = st.tuples(coord, coord)


@st.composite
def bearing_sets(draw, min_size=0, max_size=12):
    """Unit vectors at random polar angles, optionally with exact duplicates."""
    d = draw(st.integers(min_size, max_size))
    angles = draw(st.lists(st.floats(-math.pi, math.pi, allow_nan=False),
                           min_size=d, max_size=d))
    if angles and draw(st.booleans()):
        angles.append(angles[0])
    return np.array([[math.cos(a), math.sin(a)] for a in angles]).reshape(-1, 2)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
