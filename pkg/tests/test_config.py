import pytest

from nswsu.config import parse_config
from nswsu.core import Formulation
from nswsu.errors import ConfigError

BASE = """\
[scenario]
kind = smooth_periodic
u_amp = 0.5

[params]
gamma = 2
a = 1
mu = 0.01
alpha = 2

[grid]
length = 1
cells = 64

[controls]
t_end = 0.1
"""


def test_defaults():
    cfg = parse_config(BASE)
    assert cfg.kind == "smooth_periodic" and cfg.knobs == {"u_amp": 0.5}
    assert cfg.params.delta == 0.1
    assert cfg.controls.cfl_advective == 0.45 and cfg.controls.cfl_diffusive == 0.25
    assert cfg.controls.density_floor == 1e-12
    assert cfg.command.formulation is Formulation.V_FORM
    assert cfg.grid.cells == 64 and cfg.grid.spacing == 1 / 64


def test_invalid_gamma_names_key_and_line():
    with pytest.raises(ConfigError) as info:
        parse_config(BASE.replace("gamma = 2", "gamma = 0.9"))
    assert "params.gamma" in str(info.value) and "line 6" in str(info.value)


def test_misspelled_key_is_echoed():
    with pytest.raises(ConfigError) as info:
        parse_config(BASE.replace("t_end = 0.1", "t_ned = 0.1"))
    msg = str(info.value)
    assert "controls.t_ned" in msg and "line 16" in msg


@pytest.mark.parametrize("edit", [
    ("cells = 64", "cells = 3"),
    ("cells = 64", "cells = 6.5"),
    ("mu = 0.01", "mu = abc"),
    ("[grid]", "[gird]"),
    ("kind = smooth_periodic", "kind = nope"),
    ("u_amp = 0.5", "u_amp = 0.5\nu_amp = 0.2"),
])
def test_rejections(edit):
    with pytest.raises(ConfigError):
        parse_config(BASE.replace(*edit))


def test_missing_required():
    with pytest.raises(ConfigError, match="controls.t_end"):
        parse_config(BASE.replace("t_end = 0.1", ""))


def test_command_section():
    cfg = parse_config(BASE + "[command]\neps = 0.1, 0.01\ntarget = rho\nformulation = u_form\n")
    assert cfg.command.eps == (0.1, 0.01) and cfg.command.target == "rho"
    assert cfg.command.formulation is Formulation.U_FORM
