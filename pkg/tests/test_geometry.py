import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruledsurf.errors import InvalidResolution, NormalUndefined, SingularPointGiven
from ruledsurf.frame import FrameField, multiplicities
from ruledsurf.geometry import (
    SurfaceContext,
    build_mesh,
    curvatures,
    eval_surface,
    export_mesh,
    fundamental_forms,
    unit_normal,
)
from ruledsurf.oracle import gauss_map_K, surface_partials
from ruledsurf.singular import developability_test, singular_locus


def context(spec):
    field = FrameField(spec)
    mult = multiplicities(spec, field.germ)
    return SurfaceContext(field, mult, developability_test(spec, mult).developable)


@pytest.fixture(scope="module")
def contexts(builtin_scenes):
    return {n: context(s.spec) for n, s in builtin_scenes.items()}


def test_eval_surface_examples(builtin_scenes):
    np.testing.assert_allclose(eval_surface(builtin_scenes["g1"].spec, 0.0, 1.0), [1, 0, 0])
    g2 = builtin_scenes["g2"].spec
    for t in (-1.0, 0.5):
        np.testing.assert_allclose(eval_surface(g2, 0.0, t), [t, 0, 0])
        np.testing.assert_allclose(eval_surface(g2, 0.3, 0.0), g2.gamma_real(0.3))


def test_developable_normal_is_binormal(contexts):
    ctx = contexts["g4"]
    for x, t in ((0.3, 1.0), (-0.7, -0.2)):
        np.testing.assert_allclose(unit_normal(ctx, x, t), ctx.field.at(x).binormal.value())


def test_g3_normal_defined_on_the_ruling(contexts):
    for t in (-1.0, 0.0, 1.5):
        nu = unit_normal(contexts["g3"], 0.0, t)
        assert np.linalg.norm(nu) == pytest.approx(1.0)


def test_g1_normal_undefined_at_origin(contexts):
    with pytest.raises(NormalUndefined):
        unit_normal(contexts["g1"], 0.0, 0.0)


def test_forms_at_singular_point_raise(contexts):
    with pytest.raises(SingularPointGiven):
        fundamental_forms(contexts["g3"], 0.0, 0.5)


@pytest.mark.parametrize("name", ["g1", "g2", "g4", "g5"])
@given(x=st.floats(0.05, 0.95), sx=st.sampled_from([-1, 1]), t=st.floats(-2, 2))
@settings(max_examples=15, deadline=None)
def test_forms_match_differences(contexts, name, x, sx, t):
    ctx = contexts[name]
    x *= sx
    fr = ctx.field.at(x)
    if np.hypot(fr.q.value + t * fr.delta.value, fr.r.value) < 1e-2:
        return
    ff = fundamental_forms(ctx, x, t)
    assert ff.G == 1.0 and ff.N == 0.0
    if ctx.developable:
        assert ff.M == 0.0
    Fx, Ft = surface_partials(ctx.spec, x, t)
    for a, b in ((ff.E, Fx @ Fx), (ff.F, Fx @ Ft), (ff.G, Ft @ Ft)):
        assert abs(a - b) <= 1e-7 * max(1.0, abs(b))


@pytest.mark.parametrize("name", ["g2", "g3", "g4", "g5"])
@given(x=st.floats(0.05, 0.95), sx=st.sampled_from([-1, 1]), t=st.floats(-2, 2))
@settings(max_examples=15, deadline=None)
def test_frontal_normal_is_orthogonal(contexts, name, x, sx, t):
    ctx = contexts[name]
    x *= sx
    fr = ctx.field.at(x)
    nu = unit_normal(ctx, x, t)
    Fx = fr.p.value * fr.xi_bar.value() + (fr.q.value + t * fr.delta.value) * fr.xi_d.value() \
        + fr.r.value * fr.binormal.value()
    scale = max(1.0, float(np.abs(Fx).max()))
    assert abs(nu @ Fx) < 1e-8 * scale and abs(nu @ fr.xi_bar.value()) < 1e-8


def test_g1_curvature_is_negative(contexts):
    ctx = contexts["g1"]
    K, _, _ = curvatures(ctx, 0.4, 0.7)
    assert K < 0
    assert K == pytest.approx(gauss_map_K(ctx, 0.4, 0.7), rel=1e-4)


def test_build_mesh_shapes(contexts):
    ctx = contexts["g5"]
    locus = singular_locus(ctx.spec, nx=41, field=ctx.field, mult=ctx.mult, developable=True)
    bundle = build_mesh(ctx, (-1, 1), (-2, 2), (41, 21), locus)
    assert bundle.vertices.shape == (41, 21, 3)
    assert bundle.singular_flags[20].all()  # the ruling x = 0
    assert any(len(line) == 21 for line in bundle.singular_lines)
    with pytest.raises(InvalidResolution):
        build_mesh(ctx, (-1, 1), (-2, 2), (1, 5))


def test_export_mesh(tmp_path, contexts):
    ctx = contexts["g2"]
    out = tmp_path / "nested" / "dir"
    bundle, obj, csv = export_mesh(ctx, (-1, 1), (-2, 2), (11, 5), str(out), "g2")
    text = open(obj).read()
    assert text.count("\nv ") >= 55 and text.count("\nf ") == 40
    assert os.path.exists(csv)
    header = open(csv).readline().strip()
    assert header == "x,delta,rho,sigma,p,q,r,lambda_at_striction"
    # byte-identical on a second run
    _, obj2, _ = export_mesh(ctx, (-1, 1), (-2, 2), (11, 5), str(tmp_path / "again"), "g2")
    assert open(obj2).read() == text
