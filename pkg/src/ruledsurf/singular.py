"""Singular sets, frontal and wave-front tests, and point classification.

For a developable surface the signed area density is ``lambda = -(q + t delta)``
with unit normal ``nu = xi_bar x xi_d``, and the null vector field along the
singular set is ``eta = d/dx - p d/dt``.  For non-developable frontals the
cross product factors as ``F_x x F_t = x^m (A b + B xi_d)``.
"""

from dataclasses import dataclass, field
from math import comb
from typing import Optional, Union

import numpy as np

from .errors import FrameUndefined, JetError, NotAFrontal, RuledSurfError, StrictionUndefined
from .frame import FrameField, multiplicities
from .jets import Jet, jet_scale

ENTIRE_RULING = "entire-ruling"
#: Representative ruling parameters used on entirely singular rulings.
RULING_SAMPLES = (-1.0, 0.0, 1.0)
#: Deepest sigma / eta chain examined before a point is left unresolved.
CHAIN_DEPTH = 3
BISECT_TOL = 1e-12

KINDS = (
    "regular",
    "cuspidal-edge",
    "swallowtail",
    "cuspidal-butterfly",
    "cuspidal-cross-cap",
    "cuspidal-beaks",
    "cuspidal-lips",
    "non-frontal-singular",
    "unresolved-degenerate",
)


@dataclass(frozen=True)
class Evidence:
    name: str
    value: float
    threshold: float

    @property
    def is_zero(self):
        return abs(self.value) <= self.threshold

    @property
    def marginal(self):
        return self.threshold / 10.0 <= abs(self.value) <= 10.0 * self.threshold

    def to_dict(self):
        return {"name": self.name, "value": self.value, "threshold": self.threshold}


class EvidenceLog:
    """Collects every comparison made while classifying one point."""

    def __init__(self, tol):
        self.tol = tol
        self.items = []

    def zero(self, name, value, scale=1.0):
        ev = Evidence(name, float(value), self.tol * max(1.0, float(scale)))
        self.items.append(ev)
        return ev.is_zero

    def nonzero(self, name, value, scale=1.0):
        return not self.zero(name, value, scale)

    def jet_zero(self, name, jet, n=0):
        """Zero test on the ``n``-th derivative of ``jet`` at its base point."""
        d = jet
        for _ in range(n):
            d = d.deriv()
        return self.zero(name, d.value, jet_scale(d.c))

    def note(self, name, value, threshold):
        self.items.append(Evidence(name, float(value), float(threshold)))

    @property
    def marginal(self):
        return [e.name for e in self.items if e.marginal]


@dataclass(frozen=True)
class SingularPoint:
    x0: float
    t0: Union[float, str]
    on_striction: bool = False

    @property
    def entire_ruling(self):
        return self.t0 == ENTIRE_RULING

    def to_dict(self):
        return {"x0": self.x0, "t0": self.t0, "on_striction": self.on_striction}


@dataclass(frozen=True)
class ClassificationReport:
    point: SingularPoint
    developable: bool
    case_label: str
    trichotomy: str
    frontal: bool
    wavefront: bool
    nondegenerate: Union[bool, str]
    kind: str
    reason: str = ""
    evidence: tuple = ()
    marginal: tuple = ()
    samples: tuple = ()  # per-t reports on an entirely singular ruling
    eta_table: tuple = ()

    def to_dict(self):
        d = {
            "point": self.point.to_dict(),
            "developable": self.developable,
            "case_label": self.case_label,
            "trichotomy": self.trichotomy,
            "frontal": self.frontal,
            "wavefront": self.wavefront,
            "nondegenerate": self.nondegenerate,
            "kind": self.kind,
            "evidence": [e.to_dict() for e in self.evidence],
            "marginal": list(self.marginal),
        }
        if self.reason:
            d["reason"] = self.reason
        if self.samples:
            d["samples"] = [s.to_dict() for s in self.samples]
        if self.eta_table:
            d["eta_lambda"] = list(self.eta_table)
        return d


# --------------------------------------------------------------------------
# developability, case labels, frontal / wave-front tests


@dataclass(frozen=True)
class DevelopabilityCertificate:
    developable: bool
    r_at_germ: object  # valuation label of r at 0
    grid_max_det: float
    threshold: float
    grid_points: int

    def to_dict(self):
        return {
            "developable": self.developable,
            "r_valuation_at_0": self.r_at_germ,
            "grid_max_det": self.grid_max_det,
            "threshold": self.threshold,
            "grid_points": self.grid_points,
        }


def developability_test(spec, mult=None, xs=None):
    """``r`` zero to order N at 0 and ``det(gamma', xi_bar, xi_bar')`` small on a grid."""
    if mult is None:
        mult = multiplicities(spec)
    if xs is None:
        xs = np.linspace(-1.0, 1.0, 401)
    worst = 0.0
    threshold = 0.0
    n = 0
    for x in xs:
        try:
            xib = spec.xi_jet(float(x), 1).normalize(spec.tol)
            gp = spec.gamma_prime_jet(float(x), 1).value()
        except RuledSurfError:
            continue
        a, b = xib.value(), xib.deriv().value()
        det = float(np.dot(gp, np.cross(a, b)))
        scale = max(1.0, float(np.max(np.abs(np.concatenate([gp, b])))))
        if abs(det) / scale > worst:
            worst = abs(det) / scale
        n += 1
    threshold = spec.tol
    dev = mult.R.is_zero and worst < threshold
    return DevelopabilityCertificate(dev, mult.R.label, worst, threshold, n)


def trichotomy(mult):
    """Case i / ii / iii of the germ: delta(0) != 0; q(0) != 0 = delta(0); q(0) = delta(0) = 0."""
    if mult.k.m == 0:
        return "i"
    if mult.Q.m == 0:
        return "ii"
    return "iii"


def table_case(mult):
    """Developable case I-IV from the multiplicities k and Q."""
    k = mult.k.m
    if k == 0:
        return "II" if mult.Q.at_least(0) else "I"
    if mult.Q.m == 0:
        return "I"
    return "IV" if mult.Q.at_least(k) else "III"


def case_label(mult, frame=None, developable=True):
    """I-IV for developables; i-iii for non-developables, "none" when r(0) != 0."""
    if developable:
        return table_case(mult)
    if mult.R.m == 0:
        return "none"
    return trichotomy(mult)


def _inf(v):
    return float("inf") if v.is_zero else v.m


def frontal_test(mult, developable):
    """Returns ``(frontal, order_limited)``."""
    if developable:
        return True, False
    limited = mult.Q.is_zero or mult.R.is_zero
    return mult.k.m > min(_inf(mult.Q), _inf(mult.R)), limited


def factor_order(mult):
    return int(min(_inf(mult.Q), _inf(mult.R)))


def factored_AB(frame, mult, t):
    """Jets ``A(x, t)`` (fixed t) and ``B(x)`` with ``F_x x F_t = x^m (A b + B xi_d)``."""
    m = factor_order(mult)
    A = -(frame.q.shift_down(m) + frame.delta.shift_down(m) * float(t))
    B = frame.r.shift_down(m)
    return A, B


def wavefront_expression(frame, mult, t):
    """``rho (A^2 + B^2) + A_x B - A B'`` at ``(0, t)``."""
    A, B = factored_AB(frame, mult, t)
    a0, b0 = A.value, B.value
    return frame.rho.value * (a0 * a0 + b0 * b0) + A.deriv().value * b0 - a0 * B.deriv().value


def wavefront_test(frame, mult, developable, point=None, log=None):
    log = log if log is not None else EvidenceLog(frame.tol)
    if developable:
        return log.nonzero("rho(x0)", frame.rho.value, jet_scale(frame.rho.c))
    frontal, _ = frontal_test(mult, developable)
    if not frontal or not frame.is_germ:
        raise NotAFrontal("wave-front test needs a frontal germ")
    t = 0.0 if point is None or point.entire_ruling else float(point.t0)
    return log.nonzero(f"wavefront_AB(0,{t:g})", wavefront_expression(frame, mult, t))


# --------------------------------------------------------------------------
# area density


@dataclass(frozen=True)
class AreaDensityData:
    """Signed area density ``lambda = det(F_x, F_t, nu)``."""

    developable: bool
    q: Jet
    delta: Jet
    r: Jet
    m: Optional[int] = None
    field: Optional[FrameField] = field(default=None, compare=False)

    def lambda_jet(self, t):
        """Jet in x of ``lambda(., t)`` at the base point of the frame."""
        if self.developable:
            return -(self.q + self.delta * float(t))
        raise NotAFrontal("the factored density is not a jet; use A and B")

    def A(self, t):
        return -(self.q.shift_down(self.m) + self.delta.shift_down(self.m) * float(t))

    def B(self):
        return self.r.shift_down(self.m)

    def __call__(self, x, t):
        if self.field is None:
            raise ValueError("no frame field attached")
        fr = self.field.at(x)
        lin = fr.q.value + float(t) * fr.delta.value
        if self.developable:
            return -lin
        w = float(np.hypot(lin, fr.r.value))
        return w * (np.sign(x) ** self.m if x != 0 else 0.0)


def area_density(frame, mult, developable, field=None):
    if developable:
        return AreaDensityData(True, frame.q, frame.delta, frame.r, None, field)
    frontal, _ = frontal_test(mult, developable)
    if not frontal:
        raise NotAFrontal(
            f"k={mult.k.label} <= min(Q, R) = min({mult.Q.label}, {mult.R.label})"
        )
    return AreaDensityData(False, frame.q, frame.delta, frame.r, factor_order(mult), field)


def eta_lambda_derivatives(frame, t0, n_max=CHAIN_DEPTH + 1):
    """``[eta lambda, eta^2 lambda, ...]`` at ``(x0, t0)`` for a developable."""
    q, d, p = frame.q, frame.delta, frame.p
    out = []
    for n in range(1, n_max + 1):
        v = -(q.derivative(n) + t0 * d.derivative(n))
        for i in range(n):
            v += comb(n, i) * p.derivative(n - 1 - i) * d.derivative(i)
        out.append(float(v))
    return out


def lambda_gradient(frame, t0):
    """``d lambda = (-(q' + t delta'), -delta)`` at ``(x0, t0)``."""
    return np.array([-(frame.q.derivative(1) + t0 * frame.delta.derivative(1)), -frame.delta.value])


def nondegeneracy_test(frame, mult, developable, t0, log=None):
    log = log if log is not None else EvidenceLog(frame.tol)
    if developable:
        g = lambda_gradient(frame, t0)
        return log.nonzero("|dlambda|", float(np.linalg.norm(g)))
    m = factor_order(mult)
    if m == 1:
        A, B = factored_AB(frame, mult, t0)
        return log.nonzero("|dlambda|", float(np.hypot(A.value, B.value)))
    log.note("m", m, 1)
    return False


def hess_lambda_det(frame):
    """``det Hess lambda = -(delta')^2`` on developables."""
    return -frame.delta.derivative(1) ** 2


# --------------------------------------------------------------------------
# classification


def _report(point, developable, mult_labels, frontal, wavefront, nondeg, kind, log, **kw):
    case, tri = mult_labels
    return ClassificationReport(
        point=point,
        developable=developable,
        case_label=case,
        trichotomy=tri,
        frontal=frontal,
        wavefront=wavefront,
        nondegenerate=nondeg,
        kind=kind,
        evidence=tuple(log.items),
        marginal=tuple(log.marginal),
        **kw,
    )


def classify_striction_point(frame, x0, t0, developable, labels):
    """Developable point on the striction curve: delta / rho / sigma criteria."""
    log = EvidenceLog(frame.tol)
    point = SingularPoint(float(x0), float(t0), True)
    sigma = frame.sigma
    rho_nz = log.nonzero("rho(x0)", frame.rho.value, jet_scale(frame.rho.c))
    delta_nz = log.nonzero("delta(x0)", frame.delta.value, jet_scale(frame.delta.c))
    nondeg = nondegeneracy_test(frame, None, True, t0, log)
    eta = tuple(eta_lambda_derivatives(frame, t0, min(CHAIN_DEPTH + 1, frame.q.order)))

    def done(kind, reason=""):
        return _report(point, developable, labels, True, rho_nz, nondeg, kind, log,
                       reason=reason, eta_table=eta)

    if sigma is None:
        return done("unresolved-degenerate", "sigma unavailable at this order")
    if delta_nz:
        if rho_nz:
            for n, kind in enumerate(("cuspidal-edge", "swallowtail", "cuspidal-butterfly")):
                if n > sigma.order:
                    break
                if not log.jet_zero(f"sigma^({n})(x0)", sigma, n):
                    return done(kind)
            return done("unresolved-degenerate", "sigma vanishes through order 2")
        if log.nonzero("rho'(x0)", frame.rho.derivative(1), jet_scale(frame.rho.deriv().c)) and (
            not log.jet_zero("sigma(x0)", sigma)
        ):
            return done("cuspidal-cross-cap")
        return done("unresolved-degenerate", "not a wave front and cross-cap test fails")
    # delta(x0) = 0: degenerate striction point
    log.note("det_hess_lambda", hess_lambda_det(frame), 0.0)  # <= 0: lips unreachable
    dd = frame.delta.deriv()
    if (
        log.nonzero("delta'(x0)", dd.value, jet_scale(dd.c))
        and rho_nz
        and not log.jet_zero("sigma'(x0)", sigma, 1)
    ):
        return done("cuspidal-beaks")
    return done("unresolved-degenerate", "Scherbak candidate")


def classify_ruling_sample(frame, mult, t, developable, labels, frontal):
    """One representative point ``(0, t)`` of an entirely singular ruling."""
    log = EvidenceLog(frame.tol)
    point = SingularPoint(0.0, float(t), False)
    if not frontal:
        return _report(point, developable, labels, False, False, "not-applicable",
                       "non-frontal-singular", log)
    if developable:
        wave = log.nonzero("rho(0)", frame.rho.value, jet_scale(frame.rho.c))
        nondeg = nondegeneracy_test(frame, mult, True, t, log)
        eta = tuple(eta_lambda_derivatives(frame, t, CHAIN_DEPTH + 1))
        if not nondeg:
            return _report(point, developable, labels, True, wave, False,
                           "unresolved-degenerate", log,
                           reason="degenerate point on a singular ruling", eta_table=eta)
        if wave:
            log.nonzero("eta_lambda(0,t)", eta[0])
            return _report(point, developable, labels, True, True, True,
                           "cuspidal-edge", log, eta_table=eta)
        return _report(point, developable, labels, True, False, True,
                       "unresolved-degenerate", log,
                       reason="not a wave front: cross-cap candidate", eta_table=eta)
    m = factor_order(mult)
    wave = log.nonzero(f"wavefront_AB(0,{t:g})", wavefront_expression(frame, mult, t))
    nondeg = nondegeneracy_test(frame, mult, False, t, log)
    if not nondeg:
        return _report(point, developable, labels, True, wave, False,
                       "unresolved-degenerate", log, reason=f"m={m} >= 2")
    if wave:
        return _report(point, developable, labels, True, True, True, "cuspidal-edge", log)
    return _report(point, developable, labels, True, False, True, "unresolved-degenerate", log,
                   reason="not a wave front: cross-cap candidate")


def classify_entire_ruling(frame, mult, developable, labels, frontal, ts=RULING_SAMPLES):
    samples = tuple(classify_ruling_sample(frame, mult, t, developable, labels, frontal) for t in ts)
    kinds = {s.kind for s in samples}
    log = EvidenceLog(frame.tol)
    if len(kinds) == 1:
        kind = samples[0].kind
        reason = samples[0].reason
    else:
        kind, reason = "unresolved-degenerate", "kind varies along the ruling"
    nd = {s.nondegenerate for s in samples}
    return ClassificationReport(
        point=SingularPoint(0.0, ENTIRE_RULING, False),
        developable=developable,
        case_label=labels[0],
        trichotomy=labels[1],
        frontal=frontal,
        wavefront=all(s.wavefront for s in samples),
        nondegenerate=nd.pop() if len(nd) == 1 else "mixed",
        kind=kind,
        reason=reason,
        evidence=tuple(log.items),
        marginal=tuple(sorted({m for s in samples for m in s.marginal})),
        samples=samples,
    )


def classify_nonfrontal(x0, t0, developable, labels, tol, evidence=()):
    log = EvidenceLog(tol)
    for name, v in evidence:
        log.zero(name, v)
    return _report(SingularPoint(float(x0), t0, False), developable, labels, False, False,
                   "not-applicable", "non-frontal-singular", log)


def classify_point(spec, frame, mult, point, developable, field=None):
    """Classify ``point`` (a :class:`SingularPoint`) with an evidence trail."""
    labels = (case_label(mult, frame, developable), trichotomy(mult))
    frontal, _ = frontal_test(mult, developable)
    if point.entire_ruling:
        return classify_entire_ruling(frame, mult, developable, labels, frontal)
    if not developable and (not frontal or point.x0 != 0.0):
        return classify_nonfrontal(point.x0, point.t0, developable, labels, spec.tol)
    if point.x0 == 0.0:
        fr = frame
    else:
        fr = (field or FrameField(spec, frame)).at(point.x0)
    if developable and point.on_striction:
        return classify_striction_point(fr, point.x0, point.t0, developable, labels)
    return classify_ruling_sample(fr, mult, point.t0, developable, labels, frontal)


# --------------------------------------------------------------------------
# singular set


@dataclass
class SingularLocus:
    points: list
    curve: list  # (x, t) samples of the singular curve away from the germ
    gaps: list  # x values where the frame is undefined
    notes: list


def _bisect(f, a, b, fa, fb):
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if abs(fm) < BISECT_TOL or b - a < 4e-16 * max(1.0, abs(mid)):
            return mid
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _sign_roots(xs, vals, f):
    roots = []
    for i in range(len(xs) - 1):
        a, b = xs[i], xs[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa is None or fb is None or (a < 0.0 < b):
            continue  # the germ x = 0 is analysed separately
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(_bisect(f, a, b, fa, fb))
    return roots


def singular_locus(spec, x_range=(-1.0, 1.0), t_range=(-2.0, 2.0), nx=401,
                   field=None, mult=None, developable=None, curve_stride=20):
    """Singular points of ``F`` over the window, with germ handling at x = 0."""
    field = field or FrameField(spec)
    germ = field.germ
    mult = mult or multiplicities(spec, germ)
    if developable is None:
        developable = developability_test(spec, mult, np.linspace(*x_range, nx)).developable
    tlo, thi = t_range
    xs = np.linspace(x_range[0], x_range[1], nx)
    points, curve, gaps, notes = [], [], [], []
    in_window = x_range[0] <= 0.0 <= x_range[1]
    frontal, _ = frontal_test(mult, developable)

    def frame_or_none(x):
        try:
            return field.at(x)
        except (FrameUndefined, JetError) as exc:
            gaps.append({"x": float(x), "reason": str(exc)})
            return None

    off = [float(x) for x in xs if x != 0.0]
    frames = [frame_or_none(x) for x in off]

    if developable:
        # the singular set is the striction curve t = -q / delta
        def scalar(name):
            def f(x):
                fr = field.at(x, None) if x != 0.0 else germ
                j = getattr(fr, name)
                return np.nan if j is None else j.value
            return f

        tv = [None if fr is None or fr.t is None else fr.t.value for fr in frames]
        for i, (x, t) in enumerate(zip(off, tv)):
            if t is not None and tlo <= t <= thi:
                curve.append((x, t))
                if i % curve_stride == 0:
                    points.append(SingularPoint(x, t, True))
        specials = set()
        for name in ("sigma", "rho"):
            vals = [None if fr is None or getattr(fr, name) is None else getattr(fr, name).value
                    for fr in frames]
            segs = _split(off, vals)
            for sx, sv in segs:
                floor = spec.tol * max(1.0, max(abs(v) for v in sv))
                if max(abs(v) for v in sv) <= floor:
                    continue  # identically zero up to the tolerance
                for root in _sign_roots(sx, sv, scalar(name)):
                    specials.add(round(root, 13))
        for root in sorted(specials):
            if root == 0.0:
                continue
            fr = frame_or_none(root)
            if fr is None or fr.t is None:
                continue
            if tlo <= fr.t.value <= thi:
                points.append(SingularPoint(float(root), fr.t.value, True))
        if in_window:
            case = table_case(mult)
            if case in ("III", "IV"):
                points.append(SingularPoint(0.0, ENTIRE_RULING, False))
            if case in ("II", "IV") and germ.t is not None:
                points.append(SingularPoint(0.0, germ.t.value, True))
            if not mult.striction_at_germ:
                notes.append(asymptotic_note(field, mult))
    else:
        def rval(x):
            return (field.at(x) if x != 0.0 else germ).r.value

        rv = [None if fr is None else fr.r.value for fr in frames]
        for sx, sv in _split(off, rv):
            for root in _sign_roots(sx, sv, rval):
                if root == 0.0:
                    continue
                fr = frame_or_none(root)
                if fr is None:
                    continue
                t0 = -fr.q.value / fr.delta.value
                if tlo <= t0 <= thi:
                    points.append(SingularPoint(float(root), t0, False))
                    curve.append((float(root), t0))
        if in_window and mult.R.m != 0:
            # r(0) = 0: singular points on the ruling x = 0 where q(0) + t delta(0) = 0
            if mult.k.m == 0:
                t0 = -germ.q.value / germ.delta.value
                if tlo <= t0 <= thi:
                    points.append(SingularPoint(0.0, t0, False))
            elif mult.Q.m != 0:
                points.append(SingularPoint(0.0, ENTIRE_RULING, False))
        if in_window and mult.k.m > 0 and not mult.striction_at_germ:
            notes.append(asymptotic_note(field, mult))
    points.sort(key=lambda p: (p.x0, -1.0 if p.entire_ruling else float(p.t0)))
    return SingularLocus(points, curve, gaps, notes)


def _split(xs, vals):
    """Split a sampled function into runs without missing values."""
    runs, cur_x, cur_v = [], [], []
    for x, v in zip(xs, vals):
        if v is None or not np.isfinite(v):
            if cur_x:
                runs.append((cur_x, cur_v))
            cur_x, cur_v = [], []
            continue
        cur_x.append(x)
        cur_v.append(v)
    if cur_x:
        runs.append((cur_x, cur_v))
    return runs


def singular_set(spec, x_range=(-1.0, 1.0), t_range=(-2.0, 2.0), nx=401, **kw):
    return singular_locus(spec, x_range, t_range, nx, **kw).points


def asymptotic_note(field, mult):
    """Divergence of ``t(x) = -q / delta`` as ``x -> 0`` when Q < k."""
    samples = []
    for x in (-1e-1, -1e-2, 1e-2, 1e-1):
        try:
            samples.append({"x": x, "t": field.t_value(x)})
        except (StrictionUndefined, FrameUndefined, JetError):
            pass
    return {
        "kind": "asymptotic-line",
        "message": (
            f"Q={mult.Q.label} < k={mult.k.label}: t(x) = -q(x)/delta(x) diverges as x -> 0; "
            "the striction curve approaches the ruling x = 0 as an asymptotic line"
        ),
        "samples": samples,
    }


def striction_bullets(mult, points, radius=0.1):
    """Test the two characterizations of the singular image near 0 independently.

    Each condition is reported alongside what the sampled singular set shows,
    since the two are not exclusive alternatives when ``r(0) = 0``.
    """
    near = [p for p in points if abs(p.x0) <= radius]
    return {
        "r_identically_zero": bool(mult.R.is_zero),
        "r_finite_valuation": not mult.R.is_zero,
        "r_valuation": mult.R.label,
        "singular_points_near_0": len(near),
        "all_near_0_on_striction": bool(near) and all(p.on_striction for p in near),
    }
