"""Surface evaluation, unit normals, fundamental forms and mesh export.

With ``F_x = p xi_bar + (q + t delta) xi_d + r b`` and ``F_t = xi_bar`` the
cross product is ``F_x x F_t = -(q + t delta) b + r xi_d``; its length ``W`` is
the area density up to sign.
"""

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    FrameUndefined,
    InvalidResolution,
    JetError,
    NormalUndefined,
    RuledSurfError,
    SingularPointGiven,
)
from .fmt import format_float
from .frame import FrameField
from .singular import ENTIRE_RULING, factor_order, frontal_test


@dataclass(frozen=True)
class FundamentalForms:
    E: float
    F: float
    G: float
    L: float
    M: float
    N: float

    def as_tuple(self):
        return (self.E, self.F, self.G, self.L, self.M, self.N)


@dataclass(frozen=True)
class SurfaceContext:
    """What the geometric routines need besides the SurfaceSpec."""

    field: FrameField
    mult: object
    developable: bool

    @property
    def spec(self):
        return self.field.spec


def eval_surface(spec, x, t):
    """``gamma(x) + t xi_bar(x)``; ``x`` and ``t`` broadcast as arrays."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if x.ndim == 0:
        g, xb = spec.gamma_real(float(x)), spec.xi_bar_real(float(x))
        return g + t[..., None] * xb if t.ndim else g + float(t) * xb
    g = spec.gamma_real(x)
    xb = spec.xi_bar_real(x)
    return (g + t * xb).T


def _parts(fr, t):
    lin = fr.q.value + t * fr.delta.value
    return lin, fr.r.value


def tangent_vectors(fr, t):
    """``(F_x, F_t)`` at ``(fr.x0, t)`` from the frame."""
    xb, xd, b = fr.xi_bar.value(), fr.xi_d.value(), fr.binormal.value()
    lin, r = _parts(fr, t)
    return fr.p.value * xb + lin * xd + r * b, xb


def area_element(fr, t):
    """``|F_x x F_t| = sqrt((q + t delta)^2 + r^2)``."""
    lin, r = _parts(fr, t)
    return float(np.hypot(lin, r))


def _is_singular(fr, t):
    Fx, _ = tangent_vectors(fr, t)
    scale = max(1.0, float(np.max(np.abs(Fx))))
    return area_element(fr, t) <= fr.tol * scale


def unit_normal(ctx, x, t):
    """Unit normal, continuous across the singular set whenever the surface is frontal.

    Developables use the binormal ``xi_bar x xi_d``; non-developable frontals use
    ``(A b + B xi_d) / sqrt(A^2 + B^2)`` at the germ and the same orientation
    elsewhere.  Regular points of a non-frontal use ``F_x x F_t / |F_x x F_t|``.
    """
    fr = ctx.field.at(x)
    b, xd = fr.binormal.value(), fr.xi_d.value()
    if ctx.developable:
        return b
    lin, r = _parts(fr, t)
    frontal, _ = frontal_test(ctx.mult, False)
    if frontal:
        m = factor_order(ctx.mult)
        if x == 0.0:
            A = -(fr.q.shift_down(m).value + t * fr.delta.shift_down(m).value)
            B = fr.r.shift_down(m).value
            w = np.hypot(A, B)
            if w <= fr.tol:
                raise NormalUndefined(f"A^2 + B^2 vanishes at (0, {t})")
            return (A * b + B * xd) / w
        w = np.hypot(lin, r)
        if w == 0.0:
            raise NormalUndefined(f"F_x x F_t vanishes at ({x}, {t})")
        return np.sign(x) ** m * (-lin * b + r * xd) / w
    if _is_singular(fr, t):
        raise NormalUndefined(f"({x}, {t}) is a singular point of a non-frontal surface")
    return (-lin * b + r * xd) / np.hypot(lin, r)


def _second_form_regular(fr, t, developable=False):
    """``L, M`` with respect to ``F_x x F_t / |F_x x F_t|``.

    On a certified developable ``r`` is zero and its roundoff is dropped.
    """
    lin, r = _parts(fr, t)
    if developable:
        r = 0.0
    W = np.hypot(lin, r)
    p, d, rho = fr.p.value, fr.delta.value, fr.rho.value
    dq, dd = fr.q.derivative(1), fr.delta.derivative(1)
    dr = 0.0 if developable else fr.r.derivative(1)
    L = (-lin * (lin * rho + dr) + r * (p * d + dq + t * dd - r * rho)) / W
    M = r * d / W
    return L, M


def fundamental_forms(ctx, x, t):
    fr = ctx.field.at(x)
    if _is_singular(fr, t):
        raise SingularPointGiven(f"({x}, {t}) is singular")
    lin, r = _parts(fr, t)
    p = fr.p.value
    L, M = _second_form_regular(fr, t, ctx.developable)
    # orient like unit_normal
    Fx, Ft = tangent_vectors(fr, t)
    nreg = np.cross(Fx, Ft)
    s = float(np.sign(np.dot(unit_normal(ctx, x, t), nreg)))
    return FundamentalForms(p * p + lin * lin + r * r, p, 1.0, s * L, s * M, 0.0)


def curvatures(ctx, x, t):
    """Gaussian and mean curvature from the fundamental forms, plus closed-form diagnostics."""
    ff = fundamental_forms(ctx, x, t)
    det = ff.E * ff.G - ff.F ** 2
    K = (ff.L * ff.N - ff.M ** 2) / det
    H = (ff.E * ff.N - 2 * ff.F * ff.M + ff.G * ff.L) / (2 * det)
    fr = ctx.field.at(x)
    W = area_element(fr, t)
    rd = fr.r.value * fr.delta.value
    diag = {
        "W": W,
        "K_literal": -rd / W ** 1.5,
        "K_closed": -(rd ** 2) / W ** 4,
        "H_literal_developable": fr.rho.value / (2 * W),
    }
    return K, H, diag


# --------------------------------------------------------------------------
# mesh export


@dataclass
class MeshBundle:
    xs: np.ndarray
    ts: np.ndarray
    vertices: np.ndarray  # (nx, nt, 3)
    singular_flags: np.ndarray  # (nx, nt) bool
    striction: list  # polylines, each an (n, 3) array
    singular_lines: list
    singular_points: list
    csv_rows: list

    def obj_text(self):
        nx, nt = self.singular_flags.shape
        out = [f"# ruled surface mesh {nx}x{nt}", "o surface"]
        for v in self.vertices.reshape(-1, 3):
            out.append("v " + " ".join(format_float(c) for c in v))
        for i in range(nx - 1):
            for j in range(nt - 1):
                a = i * nt + j + 1
                out.append(f"f {a} {a + nt} {a + nt + 1} {a + 1}")
        base = nx * nt
        if self.striction:
            out.append("o striction")
            base = _emit_lines(out, self.striction, base)
        if self.singular_lines or self.singular_points:
            out.append("o singular")
            base = _emit_lines(out, self.singular_lines, base)
            for pnt in self.singular_points:
                out.append("v " + " ".join(format_float(c) for c in pnt))
                base += 1
                out.append(f"p {base}")
        return "\n".join(out) + "\n"

    def csv_text(self):
        out = ["x,delta,rho,sigma,p,q,r,lambda_at_striction"]
        for row in self.csv_rows:
            out.append(",".join("" if v is None else format_float(v) for v in row))
        return "\n".join(out) + "\n"


def _emit_lines(out, lines, base):
    for line in lines:
        if len(line) < 2:
            continue
        for v in line:
            out.append("v " + " ".join(format_float(c) for c in v))
        out.append("l " + " ".join(str(base + i + 1) for i in range(len(line))))
        base += len(line)
    return base


def _runs(xs, pts):
    """Split a sampled polyline wherever a sample is missing."""
    runs, cur = [], []
    for p in pts:
        if p is None:
            if len(cur) > 1:
                runs.append(np.array(cur))
            cur = []
        else:
            cur.append(p)
    if len(cur) > 1:
        runs.append(np.array(cur))
    return runs


def _lambda_at(ctx, fr, t):
    lin, r = _parts(fr, t)
    if ctx.developable:
        return -lin
    w = float(np.hypot(lin, r))
    frontal, _ = frontal_test(ctx.mult, False)
    if frontal and fr.x0 != 0.0:
        return np.sign(fr.x0) ** factor_order(ctx.mult) * w
    return w


def build_mesh(ctx, x_range, t_range, resolution, locus=None):
    nx, nt = resolution
    if nx < 2 or nt < 2:
        raise InvalidResolution(f"resolution must be at least 2x2, got {nx}x{nt}")
    spec = ctx.spec
    xs = np.linspace(x_range[0], x_range[1], nx)
    ts = np.linspace(t_range[0], t_range[1], nt)
    gam = spec.gamma_real(xs).T
    xib = spec.xi_bar_real(xs).T
    verts = gam[:, None, :] + ts[None, :, None] * xib[:, None, :]
    flags = np.zeros((nx, nt), dtype=bool)
    stric, rows = [], []
    tlo, thi = t_range
    for i, x in enumerate(xs):
        try:
            fr = ctx.field.at(float(x))
        except (FrameUndefined, JetError, RuledSurfError):
            stric.append(None)
            rows.append([float(x)] + [None] * 7)
            continue
        for j, t in enumerate(ts):
            flags[i, j] = _is_singular(fr, float(t))
        tval = None if fr.t is None else fr.t.value
        sig = None if fr.sigma is None else fr.sigma.value
        lam = None if tval is None else _lambda_at(ctx, fr, tval)
        rows.append([float(x), fr.delta.value, fr.rho.value, sig, fr.p.value, fr.q.value, fr.r.value, lam])
        if tval is not None and tlo <= tval <= thi:
            stric.append(gam[i] + tval * xib[i])
        else:
            stric.append(None)
    sing_lines, sing_pts = [], []
    if locus is not None:
        if ctx.developable and locus.curve:
            # the singular set of a developable is its striction curve
            sing_lines.extend(_curve_runs(spec, locus.curve))
        for p in locus.points:
            if p.t0 == ENTIRE_RULING:
                g0 = spec.gamma_real(p.x0)
                e0 = spec.xi_bar_real(p.x0)
                sing_lines.append(np.array([g0 + t * e0 for t in ts]))
            elif not ctx.developable:
                sing_pts.append(spec.gamma_real(p.x0) + p.t0 * spec.xi_bar_real(p.x0))
    return MeshBundle(xs, ts, verts, flags, _runs(xs, stric), sing_lines, sing_pts, rows)


def _curve_runs(spec, curve):
    """Polylines through the sampled singular curve, broken where samples are far apart in x."""
    if not curve:
        return []
    xs = np.array([c[0] for c in curve])
    steps = np.diff(xs)
    gap = 1.5 * np.median(steps) if len(steps) else 0.0
    runs, cur = [], [curve[0]]
    for prev, c in zip(curve, curve[1:]):
        if c[0] - prev[0] > gap:
            runs.append(cur)
            cur = []
        cur.append(c)
    runs.append(cur)
    out = []
    for run in runs:
        if len(run) < 2:
            continue
        rx = np.array([c[0] for c in run])
        rt = np.array([c[1] for c in run])
        out.append(spec.gamma_real(rx).T + rt[:, None] * spec.xi_bar_real(rx).T)
    return out


def export_mesh(ctx, x_range, t_range, resolution, out_dir, stem="surface", locus=None):
    """Write ``<stem>.obj`` and ``<stem>.csv`` into ``out_dir`` (created if missing)."""
    bundle = build_mesh(ctx, x_range, t_range, resolution, locus)
    os.makedirs(out_dir, exist_ok=True)
    obj_path = os.path.join(out_dir, f"{stem}.obj")
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    with open(obj_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(bundle.obj_text())
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(bundle.csv_text())
    return bundle, obj_path, csv_path
