import pytest

from mwfzp.config import from_dict

# Fits a 161 x 161 grid and runs in a few seconds.
SMALL = {
    "grid": {"nx": 161, "ny": 161},
    "geometry": {"r1_nm": 60.0, "d_nm": 10.0, "n_zones": 8},
    "packet": {"sigma_x_nm": 40.0, "sigma_y_nm": 100.0, "X0_nm": -200.0},
    "solver": {"dT": 0.1, "absorber_band": 20},
}

SMALL_TOML = """
[grid]
nx = 161
ny = 161
[geometry]
r1_nm = 60.0
d_nm = 10.0
n_zones = 8
[packet]
sigma_x_nm = 40.0
sigma_y_nm = 100.0
X0_nm = -200.0
[solver]
dT = 0.1
absorber_band = 20
"""

ACCEPTANCE_LINES = {}


@pytest.fixture
def small_dict():
    import copy
    return copy.deepcopy(SMALL)


@pytest.fixture
def small_config():
    return from_dict(SMALL)


@pytest.fixture
def small_toml(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL_TOML)
    return path


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
