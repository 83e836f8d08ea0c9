"""Hypothesis strategies for physical parameter draws."""

from hypothesis import strategies as st

from mimnoise.params import DriveConfig, SystemParams

rates = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def system_params(draw, kappa_R=None, j_range=(0.1, 100.0)):
    kl = 1.0
    kr = draw(rates) if kappa_R is None else kappa_R
    kb = (kl + kr) / 2
    J = kb * draw(st.floats(*j_range))
    g = draw(st.floats(0.1, 2.0))
    wm = draw(st.floats(0.05, 5.0))
    return SystemParams(J=J, kappa_L=kl, kappa_R=kr, g=g, omega_m=wm)


@st.composite
def drives(draw, two_port=True):
    a = complex(draw(st.floats(-2, 2)), draw(st.floats(-2, 2)))
    if abs(a) < 1e-3:
        a = 1.0
    b = complex(draw(st.floats(-2, 2)), draw(st.floats(-2, 2))) if two_port else 0.0
    return DriveConfig(draw(st.floats(-3, 3)), a, b)
