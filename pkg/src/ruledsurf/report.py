"""End-to-end analysis of one scene, assembled into a JSON-ready report."""

from dataclasses import dataclass

import numpy as np

from .errors import FrameUndefined, JetError, NotAFrontal, StrictionUndefined
from .frame import FrameField, multiplicities
from .geometry import SurfaceContext
from .singular import (
    ENTIRE_RULING,
    EvidenceLog,
    case_label,
    classify_point,
    developability_test,
    frontal_test,
    singular_locus,
    striction_bullets,
    trichotomy,
    wavefront_expression,
    wavefront_test,
)

SAMPLE_COUNT = 9
JET_COEFFS = 4

CONVENTIONS = {
    "frame": "xi_bar = xi/|xi|, xi_bar' = x^k xi_tilde, xi_d = xi_tilde/|xi_tilde|, b = xi_bar x xi_d",
    "invariants": "delta = |xi_tilde| x^k, rho = <xi_d', b>, gamma' = p xi_bar + q xi_d + r b, "
    "t = -q/delta, sigma = delta (p + t')",
    "area_density": "lambda = det(F_x, F_t, nu); developables use nu = b so lambda = -(q + t delta)",
    "zero_test": "|v| <= tol * max(1, scale); 'zero-to-order-N' means zero through the jet order only",
    "orientation": "xi_d is continued smoothly through x = 0, so it flips sign for x < 0 when k is odd",
}


@dataclass
class Analysis:
    scene: object
    ctx: SurfaceContext
    locus: object
    reports: list
    certificate: object

    @property
    def mult(self):
        return self.ctx.mult


def run_analysis(scene):
    """Frames, multiplicities, singular set and per-point classification."""
    spec, opts = scene.spec, scene.options
    field = FrameField(spec)
    germ = field.germ
    mult = multiplicities(spec, germ)
    nx = opts.resolution[0]
    cert = developability_test(spec, mult, np.linspace(*opts.x_range, nx))
    ctx = SurfaceContext(field, mult, cert.developable)
    locus = singular_locus(spec, opts.x_range, opts.t_range, nx, field=field, mult=mult,
                           developable=cert.developable)
    reports = [classify_point(spec, germ, mult, p, cert.developable, field) for p in locus.points]
    return Analysis(scene, ctx, locus, reports, cert)


def _val(j):
    return None if j is None else j.value


def _coeffs(j):
    return None if j is None else [float(c) for c in j.c[:JET_COEFFS]]


def _invariants(fr, with_jets=False):
    names = ("delta", "rho", "p", "q", "r", "t", "sigma")
    d = {n: _val(getattr(fr, n)) for n in names}
    if with_jets:
        d["jets"] = {n: _coeffs(getattr(fr, n)) for n in names}
    return d


def _wavefront_at_0(an):
    germ, mult, dev = an.ctx.field.germ, an.mult, an.ctx.developable
    log = EvidenceLog(an.scene.spec.tol)
    if dev:
        ok = wavefront_test(germ, mult, dev, log=log)
        return {"status": bool(ok), "evidence": [e.to_dict() for e in log.items]}
    frontal, _ = frontal_test(mult, dev)
    if not frontal:
        return {"status": "not-applicable", "reason": NotAFrontal.reason}
    vals = {f"{t:g}": wavefront_expression(germ, mult, t) for t in (-1.0, 0.0, 1.0)}
    ok = all(abs(v) > log.tol for v in vals.values())
    return {"status": ok, "expression_samples": vals}


def _ruling_x0(an):
    on_zero = [p for p in an.locus.points if p.x0 == 0.0]
    if any(p.t0 == ENTIRE_RULING for p in on_zero):
        return {"status": "singular", "detail": "every point of the ruling x = 0 is singular"}
    if on_zero:
        return {"status": "isolated-singular-points", "t": [float(p.t0) for p in on_zero]}
    return {"status": "regular"}


def _striction(an):
    germ, mult = an.ctx.field.germ, an.mult
    d = {"defined_at_0": germ.t is not None, "t0": _val(germ.t)}
    if germ.t is None:
        d["reason"] = StrictionUndefined.reason
    d["notes"] = list(an.locus.notes)
    d["bullets"] = striction_bullets(mult, an.locus.points)
    return d


def _samples(an):
    out = []
    lo, hi = an.scene.options.x_range
    for x in np.linspace(lo, hi, SAMPLE_COUNT):
        x = float(x)
        try:
            fr = an.ctx.field.at(x)
        except (FrameUndefined, JetError):
            out.append({"x": x, "undefined": True})
            continue
        out.append({"x": x, **_invariants(fr)})
    return out


def report_dict(an):
    spec, mult = an.scene.spec, an.mult
    dev = an.ctx.developable
    frontal, limited = frontal_test(mult, dev)
    germ = an.ctx.field.germ
    return {
        "surface": {"name": spec.name, "sources": spec.sources},
        "options": {"jet_order": spec.jet_order, "tol": spec.tol, **an.scene.options.to_dict()},
        "multiplicities": {
            **mult.labels(),
            "xi_tilde_norm_0": mult.xi_tilde_norm0,
            "q_tilde_0": mult.q_tilde0,
            "r_tilde_0": mult.r_tilde0,
        },
        "developable": dev,
        "developability": an.certificate.to_dict(),
        "case_label": case_label(mult, germ, dev),
        "trichotomy": trichotomy(mult),
        "frontal": frontal,
        "frontal_order_limited": limited,
        "wavefront_at_0": _wavefront_at_0(an),
        "striction": _striction(an),
        "ruling_x0": _ruling_x0(an),
        "singular_points": [r.to_dict() for r in an.reports],
        "gaps": list(an.locus.gaps),
        "invariants_at_0": _invariants(germ, with_jets=True),
        "invariant_samples": _samples(an),
        "conventions": CONVENTIONS,
    }


def analyze(scene):
    return report_dict(run_analysis(scene))
