import dataclasses
import math

import numpy as np
import pytest

import charmarch as cm
from charmarch import builtin

R2 = 1.0 / math.sqrt(2.0)


@pytest.fixture(scope="session")
def wave_system():
    return cm.load_system(builtin.example_text("wave3d"))


@pytest.fixture(scope="session")
def wave_side(wave_system):
    sys_, chart = wave_system
    return cm.side_matrices(sys_, chart)


@pytest.fixture(scope="session")
def wave_structure(wave_system, wave_side):
    sys_, _ = wave_system
    return cm.null_structure(wave_side, sys_.D)


@pytest.fixture(scope="session")
def wave_canon(wave_system, wave_side, wave_structure):
    sys_, _ = wave_system
    return cm.split_and_reduce(wave_structure, wave_side, sys_.D)


@pytest.fixture(scope="session")
def wave_compact(wave_canon):
    return cm.compact_form(wave_canon)


@pytest.fixture(scope="session")
def wave_report(wave_compact):
    return cm.check_criteria(wave_compact)


@pytest.fixture(scope="session")
def damped_wave_pipeline(wave_system):
    """Wave system with D = -I, so the compact R is -2I (exponential branch)."""
    sys_, chart = wave_system
    sys2 = dataclasses.replace(sys_, D=-np.eye(4))
    B = cm.side_matrices(sys2, chart)
    cs = cm.null_structure(B, sys2.D)
    canon = cm.split_and_reduce(cs, B, sys2.D)
    cf = cm.compact_form(canon)
    return canon, cf, cm.check_criteria(cf)


def sin_minus_y_terms(amp):
    """Profile terms summing to amp*sin(s - y) on a 2-torus grid."""
    return (
        cm.ProfileTerm(kind="sine", amp=amp, k=1.0,
                       trans=((1.0, 0.0), (0.0, 0.0))),
        cm.ProfileTerm(kind="sine", amp=amp, k=1.0, phase=math.pi / 2,
                       trans=((1.0, math.pi / 2), (0.0, 0.0))),
    )


@pytest.fixture(scope="session")
def manufactured_data():
    """Data of the exact wave solution built from f = cos(u + x - y):
    (q1, q2, q3, w) = (-sin(t-y)/sqrt2, sin(t-y), 0, -sin(t-y)/sqrt2)."""
    return cm.DataSpec(
        q0=(sin_minus_y_terms(-R2), sin_minus_y_terms(1.0), ()),
        w0=(sin_minus_y_terms(-R2),))


def manufactured_exact(slice_, grid, cy):
    """Exact hat-variable values of the manufactured solution on a slice."""
    x = np.arange(slice_.x_extent) * grid.dx
    y = np.arange(cy) * (2.0 * math.pi / cy)
    ph = np.sin((slice_.u_level + x)[:, None] - y[None, :])[None, :, :, None]
    return np.concatenate([-R2 * ph, ph, 0.0 * ph, -R2 * ph], axis=0)


@pytest.fixture(scope="session")
def plane_wave_data():
    """q0 = 0, w0 = sqrt(2) sin(u): an exact plane-wave solution."""
    return cm.DataSpec(
        q0=((), (), ()),
        w0=((cm.ProfileTerm(kind="sine", amp=math.sqrt(2.0), k=1.0),),))


def reversed_x_chart_text():
    """wave3d definition with the x-coordinate row negated."""
    text = builtin.example_text("wave3d")
    return text.replace("chart\n1 -1 0 0\n0 1 0 0",
                        "chart\n1 -1 0 0\n0 -1 0 0")


def psi_equals_y_chart_text():
    """wave3d definition with x = y as the transverse-surface coordinate."""
    text = builtin.example_text("wave3d")
    return text.replace(
        "chart\n1 -1 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1",
        "chart\n1 -1 0 0\n0 0 1 0\n0 1 0 0\n0 0 0 1")
