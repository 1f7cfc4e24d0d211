import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruledsurf.errors import DegenerateDirector, NotFiniteMultiplicity, StrictionUndefined
from ruledsurf.frame import (
    FrameField,
    SurfaceSpec,
    compute_frame,
    frame_ode_residual,
    multiplicities,
    normalize_director,
    pre_striction,
    reconstruction_residual,
    sigma_invariant,
    striction_curve,
)
from ruledsurf.jets import valuation
from ruledsurf.oracle import FdConfig, fd_derivative


def spec(xi, gamma=None, gamma_prime=None, **kw):
    return SurfaceSpec.from_strings(xi, gamma=gamma, gamma_prime=gamma_prime, **kw)


TWISTED = spec(["1", "2*x", "3*x^2"], gamma=["x", "x^2", "x^3"])


def test_normalize_director_examples():
    xb = normalize_director(spec(["1", "x", "0"], gamma=["0", "0", "0"]), 0.0)
    np.testing.assert_allclose(xb.value(), [1, 0, 0])
    np.testing.assert_allclose(xb.deriv().value(), [0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(normalize_director(spec(["0", "1", "0"], gamma=["x", "0", "0"]), 0.3).value(), [0, 1, 0])
    with pytest.raises(DegenerateDirector):
        normalize_director(spec(["0", "0", "0"], gamma=["x", "0", "0"]), 0.0)


def test_frame_of_g2_director(builtin_scenes):
    fr = compute_frame(builtin_scenes["g2"].spec)
    np.testing.assert_allclose(fr.xi_d.value(), [0, 1, 0], atol=1e-12)
    np.testing.assert_allclose(fr.binormal.value(), [0, 0, 1], atol=1e-12)


def test_k0_delta_is_derivative_norm(builtin_scenes):
    assert compute_frame(builtin_scenes["g1"].spec).delta.value == pytest.approx(1.0)


def test_constant_director_is_a_cylinder():
    with pytest.raises(NotFiniteMultiplicity) as info:
        compute_frame(spec(["1", "2", "3"], gamma=["x", "0", "0"]))
    assert info.value.reason == "cylinder-up-to-order-N"


@pytest.mark.parametrize(
    "name, k, Q, R",
    [("g1", 0, None, 1), ("g2", 2, 0, None), ("g3", 2, 1, None), ("g4", 3, 0, None), ("g5", 3, 1, None)],
)
def test_multiplicities(builtin_scenes, name, k, Q, R):
    m = multiplicities(builtin_scenes[name].spec)
    assert (m.k.m, m.Q.m, m.R.m) == (k, Q, R)


def test_striction_undefined_when_Q_below_k(builtin_scenes):
    for name in ("g3", "g4"):
        s = builtin_scenes[name].spec
        fr = compute_frame(s)
        with pytest.raises(StrictionUndefined):
            pre_striction(fr, multiplicities(s, fr))


def test_q_identically_zero_gives_gamma_as_striction(builtin_scenes):
    s = builtin_scenes["g1"].spec
    fr = compute_frame(s)
    assert np.all(np.abs(pre_striction(fr).c) < 1e-12)
    for x in (-0.5, 0.3):
        np.testing.assert_allclose(striction_curve(s, FrameField(s), x), s.gamma_real(x), atol=1e-12)


def test_cone_striction_is_the_apex():
    s = spec(["cos(x)", "sin(x)", "1"], gamma=["0", "0", "0"])
    field = FrameField(s)
    for x in (-0.7, 0.0, 0.4):
        np.testing.assert_allclose(field.striction_point(x), [0, 0, 0], atol=1e-12)


def test_tangent_developable_striction_is_the_curve():
    field = FrameField(TWISTED)
    for x in (-0.6, 0.25, 0.8):
        np.testing.assert_allclose(field.striction_point(x), [x, x * x, x ** 3], atol=1e-10)
    assert sigma_invariant(field.germ).value != 0.0


def test_planar_director_circle():
    fr = compute_frame(spec(["cos(x)", "sin(x)", "0"], gamma=["0", "0", "x"]))
    assert fr.delta.value == pytest.approx(1.0)
    assert abs(fr.rho.value) < 1e-14
    assert frame_ode_residual(fr) < 1e-12


@pytest.mark.parametrize("name", ["g1", "g2", "g3", "g4", "g5"])
def test_frame_consistency(builtin_scenes, name):
    fr = compute_frame(builtin_scenes[name].spec)
    assert frame_ode_residual(fr) < 1e-9
    assert reconstruction_residual(fr) < 1e-10
    # orthonormality coefficientwise
    for a, b, want in ((fr.xi_bar, fr.xi_bar, 1), (fr.xi_d, fr.xi_d, 1), (fr.xi_bar, fr.xi_d, 0),
                       (fr.binormal, fr.xi_d, 0), (fr.binormal, fr.xi_bar, 0)):
        d = a.dot(b).c
        assert abs(d[0] - want) < 1e-12 and np.all(np.abs(d[1:]) < 1e-9)


@pytest.mark.parametrize("name", ["g2", "g3", "g4", "g5"])
def test_delta_has_valuation_k(builtin_scenes, name):
    s = builtin_scenes[name].spec
    fr = compute_frame(s)
    m = multiplicities(s, fr)
    v = valuation(fr.delta)
    assert v.m == m.k.m
    assert v.leading == pytest.approx(m.xi_tilde_norm0)


def _frame_field_striction_residual(field, x):
    fd = np.array([fd_derivative(lambda u: float(field.striction_point(u)[i]), x, 1, FdConfig())[0]
                   for i in range(3)])
    return abs(fd @ field.at(x).xi_d.value())


@given(x=st.floats(0.05, 0.95), sign=st.sampled_from([-1, 1]))
@settings(max_examples=15, deadline=None)
def test_striction_property_twisted_cubic(x, sign):
    field = FrameField(TWISTED)
    assert _frame_field_striction_residual(field, sign * x) < 1e-8


@given(a0=st.floats(0.2, 2.0), a1=st.floats(-1.0, 1.0), x=st.floats(-0.9, 0.9))
@settings(max_examples=30, deadline=None)
def test_reconstruction_off_the_germ(a0, a1, x):
    s = spec(["1", "x", "x^2"], gamma_prime=[f"{a0!r}+{a1!r}*x", "x", "sin(x)"])
    fr = FrameField(s).at(x)
    assert reconstruction_residual(fr) < 1e-10
    assert frame_ode_residual(fr) < 1e-9
