"""Finite-difference oracles that check the jet-based quantities independently.

Nothing here feeds back into classification; the results only gate
``verify`` and the test suites.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import NotAFrontal, RuledSurfError, UnstableEstimate
from .exprlang import eval_jet, eval_real
from .frame import frame_ode_residual, reconstruction_residual
from .geometry import (
    area_element,
    curvatures,
    eval_surface,
    fundamental_forms,
    tangent_vectors,
    unit_normal,
)
from .jets import derivative_coefficient
from .singular import ENTIRE_RULING, factor_order, frontal_test, wavefront_expression


@dataclass(frozen=True)
class FdConfig:
    h: float = 1e-3
    levels: int = 3
    tol: float = 1e-5

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.levels < 2:
            raise ValueError("at least two Richardson levels are needed")


_CENTRAL = {
    # offsets, weights, denominator exponent; all have even error expansions
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def _central(f, x0, n, h):
    offs, w = _CENTRAL[n]
    return sum(wi * f(x0 + o * h) for o, wi in zip(offs, w)) / h ** n


def _one_sided(f, x0, n, h, direction):
    # n-th forward (or backward) difference, error expansion in powers of h
    s = sum((-1) ** (n - j) * comb(n, j) * f(x0 + direction * j * h) for j in range(n + 1))
    return s / (direction * h) ** n


def _richardson(est, ratio, order_step, first_order):
    """Neville table for steps shrinking by ``ratio``; returns ``(best, change)``.

    Column ``j`` removes the error term of order ``first_order + (j-1)*order_step``.
    The change made by the last extrapolation serves as the truncation estimate.
    """
    T = [[e] for e in est]
    for i in range(1, len(est)):
        for j in range(1, i + 1):
            fac = ratio ** (first_order + (j - 1) * order_step)
            T[i].append(T[i][j - 1] + (T[i][j - 1] - T[i - 1][j - 1]) / (fac - 1.0))
    best = T[-1][-1]
    return best, abs(best - T[-1][-2])


#: Step multipliers tried for every derivative; the one with the smallest
#: total error estimate wins.
STEP_SWEEP = (1.0, 3.0, 10.0, 30.0, 100.0)
#: Shrink factor between successive Richardson rows.
STEP_RATIO = 2.0 ** 0.5
#: One-sided and central estimates further apart than this (relative) reveal a kink.
KINK_GAP = 1e-1
_EPS = np.finfo(float).eps


def _estimate(f, x0, n, h, levels):
    """Extrapolated central difference plus an error bound (truncation + roundoff)."""
    steps = [h / STEP_RATIO ** i for i in range(levels + 1)]
    value, trunc = _richardson([_central(f, x0, n, s) for s in steps], STEP_RATIO, 2, 2)
    offs, w = _CENTRAL[n]
    fmax = max(abs(f(x0 + o * steps[-1])) for o in offs)
    # roundoff in the finest row, amplified by the extrapolation weights
    amp = 1.0
    for j in range(1, levels + 1):
        fac = STEP_RATIO ** (2 * j)
        amp *= (fac + 1.0) / (fac - 1.0)
    roundoff = amp * _EPS * sum(abs(x) for x in w) * max(1.0, fmax) / steps[-1] ** n
    return value, trunc + roundoff


def fd_derivative(f, x0, n, cfg=FdConfig()):
    """Richardson-extrapolated central difference; returns ``(value, error_estimate)``.

    The base step ``cfg.h * (1 + |x0|)`` is swept upward for the higher orders
    and the step with the smallest error estimate is kept.  Forward and
    backward one-sided estimates are compared as well, which catches kinks the
    symmetric stencil hides.
    """
    if not 0 <= n <= 4:
        raise ValueError("finite-difference orders 0..4 only")
    if n == 0:
        return float(f(x0)), 0.0
    base = cfg.h * (1.0 + abs(x0))
    best = None
    for mult in STEP_SWEEP:
        try:
            value, err = _estimate(f, x0, n, base * mult, cfg.levels)
        except RuledSurfError:
            continue
        if np.isfinite(value) and (best is None or err < best[2]):
            best = (base * mult, value, err)
    if best is None:
        raise UnstableEstimate(f"no finite difference estimate at x={x0}, n={n}")
    h, value, err = best
    scale = max(1.0, abs(value))
    if err > cfg.tol * scale:
        raise UnstableEstimate(f"Richardson levels disagree by {err:.3g} at x={x0}, n={n}")
    for direction in (1, -1):
        est = [_one_sided(f, x0, n, h / STEP_RATIO ** i, direction) for i in range(cfg.levels + 1)]
        side, side_err = _richardson(est, STEP_RATIO, 1, 1)
        # a smooth function leaves a gap of the size of the one-sided truncation error
        if abs(side - value) > max(KINK_GAP * scale, 10.0 * side_err):
            raise UnstableEstimate(
                f"{'forward' if direction > 0 else 'backward'} estimate {side:.6g} "
                f"disagrees with central {value:.6g} at x={x0}"
            )
    return float(value), float(err)


def rel_err(a, b):
    return abs(a - b) / max(1.0, abs(a))


def check_jet_vs_fd(ast, x0, n_max=4, cfg=FdConfig()):
    """Per-order table comparing jet derivatives with finite differences."""
    if n_max > 4:
        raise ValueError("n_max must be <= 4")
    jet = eval_jet(ast, x0, n_max)

    def f(x):
        return float(eval_real(ast, x))

    rows = []
    ok = True
    for n in range(n_max + 1):
        exact = derivative_coefficient(jet, n)
        try:
            est, err = fd_derivative(f, x0, n, cfg)
        except UnstableEstimate as exc:
            rows.append({"n": n, "jet": exact, "fd": None, "error": str(exc), "pass": False})
            ok = False
            continue
        e = rel_err(exact, est)
        good = e < cfg.tol
        ok &= good
        rows.append({"n": n, "jet": exact, "fd": est, "fd_err": err, "rel_err": e, "pass": good})
    return {"x0": x0, "rows": rows, "pass": ok}


# --------------------------------------------------------------------------
# frontal / wave-front oracles


def _vec_fd(g, x0, h):
    return (g(x0 + h) - g(x0 - h)) / (2 * h)


def _vec_fd_rich(g, x0, h):
    d1 = _vec_fd(g, x0, h)
    d2 = _vec_fd(g, x0, h / 2)
    return d2 + (d2 - d1) / 3.0


def phi_f_oracle(ctx, x0, curve="striction", h=1e-4):
    """``(phi_f, phi_f')`` along a singular curve from value-level frames and differences.

    ``curve="striction"`` follows ``x -> (x, t(x))`` on a developable;
    ``curve="ruling"`` follows ``t -> (0, t)`` with ``x0`` used as the ruling parameter.
    """
    spec = ctx.spec
    frontal, _ = frontal_test(ctx.mult, ctx.developable)
    if not frontal:
        raise NotAFrontal("phi_f needs a frontal")
    fld = ctx.field

    if curve == "striction":
        if not ctx.developable:
            raise NotAFrontal("striction-curve parameterization needs a developable")

        def nu(x):
            return fld.at(x).binormal.value()

        def s(x):
            return spec.gamma_real(x) + fld.t_value(x) * spec.xi_bar_real(x)

        def s_prime(x):
            # gamma' is exact; t xi_bar is differenced
            tx = lambda y: fld.t_value(y) * spec.xi_bar_real(y)
            return spec.gamma_prime_real(x) + _vec_fd_rich(tx, x, h)

        def phi(x):
            return float(np.linalg.det(np.array([s_prime(x), nu(x), _vec_fd_rich(nu, x, h)])))

        val = phi(x0)
        der = float((phi(x0 + 10 * h) - phi(x0 - 10 * h)) / (20 * h))
        return val, der

    if curve == "ruling":
        p0 = fld.germ.p.value

        def phi(t):
            nu_x = _vec_fd_rich(lambda x: unit_normal(ctx, x, t), 0.0, h)
            nu_t = _vec_fd_rich(lambda tt: unit_normal(ctx, 0.0, tt), t, h)
            dnu_eta = nu_x - p0 * nu_t
            return float(np.linalg.det(np.array([spec.xi_bar_real(0.0), unit_normal(ctx, 0.0, t), dnu_eta])))

        val = phi(x0)
        der = float((phi(x0 + 10 * h) - phi(x0 - 10 * h)) / (20 * h))
        return val, der
    raise ValueError(f"unknown curve {curve!r}")


def lagrange_jacobian(ctx, x0, t0, h=1e-5):
    """6x2 finite-difference Jacobian of ``(F, nu)``."""
    spec = ctx.spec

    def L(x, t):
        return np.concatenate([eval_surface(spec, x, t), unit_normal(ctx, x, t)])

    cx = (L(x0 + h, t0) - L(x0 - h, t0)) / (2 * h)
    ct = (L(x0, t0 + h) - L(x0, t0 - h)) / (2 * h)
    return np.column_stack([cx, ct])


def wavefront_rank_oracle(ctx, x0, t0, h=1e-5, ratio=1e-6):
    """True when the Jacobian of ``(F, nu)`` has numerical rank 2."""
    frontal, _ = frontal_test(ctx.mult, ctx.developable)
    if not frontal:
        raise NotAFrontal("wave-front test needs a frontal")
    sv = np.linalg.svd(lagrange_jacobian(ctx, x0, t0, h), compute_uv=False)
    return bool(sv[1] > ratio * max(1.0, sv[0])), [float(v) for v in sv]


# --------------------------------------------------------------------------
# sampled geometric checks


def surface_partials(spec, x, t, h=1e-4):
    """``F_x``, ``F_t`` by Richardson-extrapolated central differences."""
    Fx = _vec_fd_rich(lambda y: eval_surface(spec, y, t), x, h)
    Ft = _vec_fd_rich(lambda s: eval_surface(spec, x, s), t, h)
    return Fx, Ft


def striction_residual(ctx, x, h=1e-4):
    """``<s'(x), xi_d(x)>`` and the scale it is measured against."""
    spec, fld = ctx.spec, ctx.field
    tx = lambda y: fld.t_value(y) * spec.xi_bar_real(y)
    sp = spec.gamma_prime_real(x) + _vec_fd_rich(tx, x, h)
    xd = fld.at(x).xi_d.value()
    return float(np.dot(sp, xd)), max(1.0, float(np.max(np.abs(sp))))


def gauss_map_K(ctx, x, t, h=1e-4):
    """Gaussian curvature from the differential of the unit normal."""
    spec = ctx.spec
    Fx, Ft = surface_partials(spec, x, t, h)
    nx = _vec_fd_rich(lambda y: _reg_normal(spec, y, t), x, h)
    nt = _vec_fd_rich(lambda s: _reg_normal(spec, x, s), t, h)
    n = np.cross(Fx, Ft)
    n /= np.linalg.norm(n)
    return float(np.dot(np.cross(nx, nt), n) / np.linalg.norm(np.cross(Fx, Ft)))


def _reg_normal(spec, x, t, h=1e-5):
    Fx, Ft = surface_partials(spec, x, t, h)
    n = np.cross(Fx, Ft)
    return n / np.linalg.norm(n)


def _pick_points(rng, ctx, x_range, t_range, count, min_w=1e-2):
    pts = []
    tries = 0
    while len(pts) < count and tries < 50 * count:
        tries += 1
        x = float(rng.uniform(*x_range))
        t = float(rng.uniform(*t_range))
        if abs(x) < 1e-3:
            continue
        try:
            fr = ctx.field.at(x)
        except RuledSurfError:
            continue
        if area_element(fr, t) > min_w:
            pts.append((x, t))
    return pts


def verify(ctx, x_range=(-1.0, 1.0), t_range=(-2.0, 2.0), cfg=FdConfig(), classifications=(),
           n_points=12, seed=0):
    """Run the oracle suite; returns a JSON-ready dict with a per-check verdict."""
    spec = ctx.spec
    rng = np.random.default_rng(seed)
    checks = []

    def add(name, passed, **data):
        checks.append({"name": name, "pass": bool(passed), **data})

    # expressions
    exprs = [("xi", i, e) for i, e in enumerate(spec.xi)]
    if spec.gamma is not None:
        exprs += [("gamma", i, e) for i, e in enumerate(spec.gamma)]
    else:
        exprs += [("gamma_prime", i, e) for i, e in enumerate(spec.gamma_prime)]
    xs0 = [0.0, 0.37 * x_range[1], 0.61 * x_range[0]]
    for name, i, e in exprs:
        worst = 0.0
        ok = True
        for x0 in xs0:
            rep = check_jet_vs_fd(e, x0, 4, cfg)
            ok &= rep["pass"]
            worst = max([worst] + [r.get("rel_err", np.inf) for r in rep["rows"]])
        add(f"jet_vs_fd:{name}[{i}]", ok, max_rel_err=worst, threshold=cfg.tol)

    # frame self-consistency at the germ
    germ = ctx.field.germ
    res = frame_ode_residual(germ)
    add("frame_ode_residual", res < 1e-9, value=res, threshold=1e-9)
    rec = reconstruction_residual(germ)
    add("reconstruction_residual", rec < 1e-10, value=rec, threshold=1e-10)

    pts = _pick_points(rng, ctx, x_range, t_range, n_points)

    # first fundamental form and area density against differences of F
    worst_ff, worst_lam, worst_nu = 0.0, 0.0, 0.0
    for x, t in pts:
        Fx, Ft = surface_partials(spec, x, t)
        ff = fundamental_forms(ctx, x, t)
        for a, b in ((ff.E, Fx @ Fx), (ff.F, Fx @ Ft), (ff.G, Ft @ Ft)):
            worst_ff = max(worst_ff, rel_err(a, b))
        nu = unit_normal(ctx, x, t)
        lam_fd = float(np.dot(np.cross(Fx, Ft), nu))
        fr = ctx.field.at(x)
        lam = -(fr.q.value + t * fr.delta.value) if ctx.developable else float(
            np.dot(np.cross(*tangent_vectors(fr, t)), nu)
        )
        worst_lam = max(worst_lam, rel_err(lam, lam_fd))
        Fx_a, Ft_a = tangent_vectors(fr, t)
        worst_nu = max(worst_nu, abs(nu @ Fx_a) / max(1.0, np.abs(Fx_a).max()), abs(nu @ Ft_a))
    add("first_fundamental_form_vs_fd", worst_ff < 1e-7, max_rel_err=worst_ff, threshold=1e-7)
    add("area_density_vs_fd", worst_lam < cfg.tol, max_rel_err=worst_lam, threshold=cfg.tol)
    add("normal_orthogonality", worst_nu < 1e-8, max_abs=worst_nu, threshold=1e-8)

    # Gaussian curvature from the Gauss map, at well-conditioned points
    worst_K = 0.0
    for x, t in pts:
        K, _, _ = curvatures(ctx, x, t)
        Kfd = gauss_map_K(ctx, x, t)
        worst_K = max(worst_K, abs(K - Kfd) / max(1.0, abs(K)))
    add("gaussian_curvature_vs_gauss_map", worst_K < 1e-4, max_rel_err=worst_K, threshold=1e-4)

    # striction property <s', xi_d> = 0
    worst_s = 0.0
    n_s = 0
    for x in np.linspace(x_range[0], x_range[1], 23):
        if abs(x) < 1e-3:
            continue
        try:
            v, scale = striction_residual(ctx, float(x))
        except RuledSurfError:
            continue
        n_s += 1
        worst_s = max(worst_s, abs(v) / scale)
    add("striction_property", worst_s < 1e-8, max_abs=worst_s, threshold=1e-8, samples=n_s)

    # wave-front verdicts against the rank of d(F, nu)
    frontal, _ = frontal_test(ctx.mult, ctx.developable)
    if frontal:
        agree = True
        rows = []
        for rep in classifications:
            for sub in (rep.samples or (rep,)):
                p = sub.point
                if p.t0 == ENTIRE_RULING or not sub.frontal:
                    continue
                if any(m.startswith("rho") for m in sub.marginal):
                    continue
                rank2, sv = wavefront_rank_oracle(ctx, p.x0, float(p.t0))
                rows.append({"x0": p.x0, "t0": float(p.t0), "closed_form": sub.wavefront, "rank2": rank2})
                agree &= rank2 == sub.wavefront
        if not ctx.developable and factor_order(ctx.mult) >= 1:
            for t in (-1.0, 0.0, 1.0):
                rank2, _ = wavefront_rank_oracle(ctx, 0.0, t)
                w = abs(wavefront_expression(germ, ctx.mult, t)) > spec.tol
                rows.append({"x0": 0.0, "t0": t, "closed_form": bool(w), "rank2": rank2})
                agree &= rank2 == bool(w)
        add("wavefront_rank", agree, points=rows)
    return {"pass": all(c["pass"] for c in checks), "checks": checks}
