"""Moving frame and invariants of a ruled surface ``F(x, t) = gamma(x) + t * xi(x)``.

At a point ``x0`` the frame is ``{xi_bar, xi_d, xi_bar x xi_d}`` where
``xi_bar`` is the unit director and ``xi_d`` the unit direction of
``xi_bar'``.  At the germ point ``x0 = 0`` the derivative is first divided by
``x^k`` (its multiplicity), so ``xi_d`` stays a smooth unit jet even when
``xi_bar'`` vanishes there.  Everything is a :class:`~ruledsurf.jets.Jet`.
"""

import functools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DegenerateDirector,
    FrameUndefined,
    JetError,
    NotFiniteMultiplicity,
    SceneError,
    StrictionUndefined,
)
from .exprlang import eval_jet, eval_real, parse_expr
from .jets import (
    DEFAULT_ORDER,
    ZERO_TOL,
    Jet,
    Valuation,
    Vec3Jet,
    valuation,
    vec_valuation,
)

#: Relative size below which xi_bar'(x0) counts as vanishing away from the germ.
OFF_GERM_REL_TOL = 1e-13
#: Order used for frames away from the germ point (enough for sigma'' and eta^3 lambda).
GRID_ORDER = 6


@dataclass(frozen=True)
class SurfaceSpec:
    """Parsed ruled-surface definition.

    Exactly one of ``gamma`` (direct mode) or ``gamma_prime`` (derivative
    mode, integrated from ``gamma0`` at ``x = 0``) is set.
    """

    xi: tuple
    gamma: Optional[tuple] = None
    gamma_prime: Optional[tuple] = None
    gamma0: tuple = (0.0, 0.0, 0.0)
    jet_order: int = DEFAULT_ORDER
    tol: float = ZERO_TOL
    name: str = ""
    sources: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if (self.gamma is None) == (self.gamma_prime is None):
            raise SceneError("exactly one of gamma / gamma_prime must be given")
        for comp in (self.xi, self.gamma or self.gamma_prime):
            if len(comp) != 3:
                raise SceneError("vector expressions need exactly 3 components")
        if self.jet_order < 4:
            raise SceneError(f"jet_order must be >= 4, got {self.jet_order}")
        if not self.tol > 0:
            raise SceneError(f"tol must be positive, got {self.tol}")
        if len(self.gamma0) != 3:
            raise SceneError("gamma0 needs 3 components")

    @classmethod
    def from_strings(cls, xi, gamma=None, gamma_prime=None, gamma0=(0.0, 0.0, 0.0), **kw):
        sources = {"xi": list(xi)}
        if gamma is not None:
            sources["gamma"] = list(gamma)
        if gamma_prime is not None:
            sources["gamma_prime"] = list(gamma_prime)
            sources["gamma0"] = [float(v) for v in gamma0]
        return cls(
            xi=tuple(parse_expr(s) for s in xi),
            gamma=None if gamma is None else tuple(parse_expr(s) for s in gamma),
            gamma_prime=None if gamma_prime is None else tuple(parse_expr(s) for s in gamma_prime),
            gamma0=tuple(float(v) for v in gamma0),
            sources=sources,
            **kw,
        )

    @property
    def derivative_mode(self):
        return self.gamma_prime is not None

    def with_options(self, **kw):
        fields = dict(
            xi=self.xi,
            gamma=self.gamma,
            gamma_prime=self.gamma_prime,
            gamma0=self.gamma0,
            jet_order=self.jet_order,
            tol=self.tol,
            name=self.name,
            sources=self.sources,
        )
        fields.update(kw)
        return SurfaceSpec(**fields)

    # -- jets ---------------------------------------------------------------
    def xi_jet(self, x0, order):
        return Vec3Jet(*(eval_jet(e, x0, order) for e in self.xi))

    def gamma_prime_jet(self, x0, order):
        if self.gamma_prime is not None:
            return Vec3Jet(*(eval_jet(e, x0, order) for e in self.gamma_prime))
        return Vec3Jet(*(eval_jet(e, x0, order + 1).deriv() for e in self.gamma))

    # -- point values -------------------------------------------------------
    def xi_real(self, x):
        return np.array([eval_real(e, x) for e in self.xi], dtype=float)

    def xi_bar_real(self, x):
        v = self.xi_real(x)
        n = np.sqrt(np.sum(v * v, axis=0))
        if np.any(n <= self.tol):
            raise DegenerateDirector(f"director vanishes near x={x}")
        return v / n

    def gamma_prime_real(self, x):
        if self.gamma_prime is not None:
            return np.array([eval_real(e, x) for e in self.gamma_prime], dtype=float)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array(
            [[eval_jet(e, xi, 1).c[1] for xi in xs] for e in self.gamma]
        )
        return out[:, 0] if np.ndim(x) == 0 else out

    def gamma_real(self, x):
        """Base curve position (numerically integrated in derivative mode)."""
        if self.gamma is not None:
            return np.array([eval_real(e, x) for e in self.gamma], dtype=float)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = integrate_gamma(self, tuple(xs.tolist()))
        return out[:, 0] if np.ndim(x) == 0 else out


def _rk4_sum(spec, xs, n):
    # y' = f(x) only, so each classical RK4 step is Simpson's rule on [x, x + h]
    u = np.linspace(0.0, 1.0, 2 * n + 1)
    nodes = xs[:, None] * u[None, :]
    f = np.stack([np.broadcast_to(eval_real(e, nodes), nodes.shape) for e in spec.gamma_prime])
    h = xs / n
    w = np.ones(2 * n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return np.asarray(spec.gamma0)[:, None] + (f * w).sum(axis=2) * h[None, :] / 6.0


@functools.lru_cache(maxsize=256)
def integrate_gamma(spec, xs):
    """Integrate ``gamma'`` from 0 with fixed-step RK4, halving the step until
    the result moves by less than 1e-9."""
    xs = np.asarray(xs, dtype=float)
    n = 8
    prev = _rk4_sum(spec, xs, n)
    while n < 4096:
        n *= 2
        cur = _rk4_sum(spec, xs, n)
        if np.max(np.abs(cur - prev)) < 1e-9:
            return cur
        prev = cur
    return prev


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameData:
    x0: float
    order: int
    k: int  # local multiplicity used for the shift (always 0 away from the germ)
    orientation: int
    xi_bar: Vec3Jet
    dxi_bar: Vec3Jet
    xi_d: Vec3Jet
    binormal: Vec3Jet
    xi_tilde_norm: Jet
    delta: Jet
    rho: Jet
    p: Jet
    q: Jet
    r: Jet
    gamma_prime: Vec3Jet
    t: Optional[Jet] = None  # pre-striction function
    sigma: Optional[Jet] = None
    tol: float = ZERO_TOL

    @property
    def is_germ(self):
        return self.x0 == 0.0

    @property
    def striction_defined(self):
        return self.t is not None


@dataclass(frozen=True)
class MultiplicityData:
    k: Valuation
    Q: Valuation
    R: Valuation
    xi_tilde_norm0: float
    q_tilde0: Optional[float]
    r_tilde0: Optional[float]

    def labels(self):
        return {"k": self.k.label, "Q": self.Q.label, "R": self.R.label}

    @property
    def striction_at_germ(self):
        """Q >= k: the pre-striction function extends to x = 0."""
        return self.Q.at_least(self.k.m)


def normalize_director(spec, x0, order=None):
    order = spec.jet_order if order is None else order
    xi = spec.xi_jet(x0, order)
    if np.linalg.norm(xi.value()) <= spec.tol:
        raise DegenerateDirector(f"director vanishes at x={x0}")
    return xi.normalize(spec.tol)


def compute_frame(spec, x0=0.0, order=None, orientation=1, germ_k=0):
    """Frame and invariant jets at ``x0``.

    ``orientation`` (+1/-1) flips ``xi_d`` away from the germ so that the
    frame can be kept continuous with the germ's smooth extension.  ``germ_k``
    is the multiplicity at 0; ``xi_bar'`` of size ``~|x0|^k`` near the germ is
    not mistaken for a zero.
    """
    N = spec.jet_order if order is None else order
    tol = spec.tol
    xib = normalize_director(spec, x0, N)
    dxib = xib.deriv()
    if x0 == 0.0:
        v = vec_valuation(dxib, tol)
        if v.is_zero:
            raise NotFiniteMultiplicity(
                f"xi_bar' is zero to order {dxib.order}: cylinder up to order N"
            )
        k = v.m
        if k > N - 2:
            raise NotFiniteMultiplicity(
                f"multiplicity k={k} exceeds jet order {N} - 2; raise jet_order"
            )
        xit = v.unit_part
        orientation = 1
        size = 1.0
    else:
        k = 0
        # xi_bar' may be tiny but well resolved near the germ, so the test is
        # relative to the jet itself and the vector is rescaled before normalizing
        size = float(np.linalg.norm(dxib.value()))
        ref = float(np.max(np.abs(dxib.matrix()))) * min(1.0, abs(x0)) ** germ_k
        if size <= OFF_GERM_REL_TOL * ref:
            raise FrameUndefined(f"xi_bar' vanishes at x={x0} (off the germ point)")
        xit = dxib.scale(1.0 / size)
    nxit = xit.norm(tol)
    xid = xit.scale(1.0 / nxit)
    if orientation == -1:
        xid = -xid
    delta_unit = nxit * float(orientation)  # delta / size off the germ
    delta = nxit.mul_xpow(k) * float(orientation * size)
    b = xib.cross(xid)
    rho = xid.deriv().dot(b)
    gp = spec.gamma_prime_jet(x0, N)
    p = gp.dot(xib)
    q = gp.dot(xid)
    r = gp.dot(b)

    t = None
    sigma = None
    if x0 == 0.0:
        if valuation(q, tol).at_least(k) and q.order >= k:
            t = -(q.shift_down(k) / nxit)
    else:
        try:
            t = -(q * (1.0 / size) / delta_unit)
        except JetError:
            t = None
    if t is not None and t.order >= 1:
        sigma = delta * (p + t.deriv())
    return FrameData(
        x0=float(x0),
        order=N,
        k=k,
        orientation=orientation,
        xi_bar=xib,
        dxi_bar=dxib,
        xi_d=xid,
        binormal=b,
        xi_tilde_norm=nxit,
        delta=delta,
        rho=rho,
        p=p,
        q=q,
        r=r,
        gamma_prime=gp,
        t=t,
        sigma=sigma,
        tol=tol,
    )


def multiplicities(spec, frame=None):
    """Multiplicities ``k``, ``Q``, ``R`` at the germ point."""
    if frame is None:
        frame = compute_frame(spec, 0.0)
    if not frame.is_germ:
        raise ValueError("multiplicities are only defined at the germ point x = 0")
    kval = Valuation(frame.k, frame.xi_tilde_norm, frame.dxi_bar.order)
    Q = valuation(frame.q, spec.tol)
    R = valuation(frame.r, spec.tol)
    return MultiplicityData(
        k=kval,
        Q=Q,
        R=R,
        xi_tilde_norm0=frame.xi_tilde_norm.value,
        q_tilde0=Q.leading,
        r_tilde0=R.leading,
    )


def pre_striction(frame, mult=None):
    """Jet of ``t(x) = -q(x) / delta(x)``."""
    if frame.t is None:
        if mult is not None and frame.is_germ:
            raise StrictionUndefined(
                f"Q={mult.Q.label} < k={mult.k.label}: t(x) diverges as x -> 0"
            )
        raise StrictionUndefined(f"pre-striction function undefined at x={frame.x0}")
    return frame.t


def sigma_invariant(frame, mult=None):
    """Jet of ``sigma = delta * (p + t')``."""
    if frame.sigma is None:
        pre_striction(frame, mult)
        raise StrictionUndefined(f"jet order too low for sigma at x={frame.x0}")
    return frame.sigma


def frame_ode_residual(frame, ncoef=3):
    """Largest deviation of the frame derivatives from the skew system in delta, rho."""
    xib, xid, b = frame.xi_bar, frame.xi_d, frame.binormal
    d, r = frame.delta, frame.rho
    checks = [
        (xib.deriv(), xid.scale(d)),
        (xid.deriv(), b.scale(r) - xib.scale(d)),
        (b.deriv(), -xid.scale(r)),
    ]
    worst = 0.0
    for actual, predicted in checks:
        n = min(actual.order, predicted.order, ncoef - 1) + 1
        diff = actual.matrix()[:, :n] - predicted.matrix()[:, :n]
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def reconstruction_residual(frame):
    """``|p xi_bar + q xi_d + r b - gamma'|`` over all shared coefficients."""
    rec = frame.xi_bar.scale(frame.p) + frame.xi_d.scale(frame.q) + frame.binormal.scale(frame.r)
    n = min(rec.order, frame.gamma_prime.order) + 1
    return float(np.max(np.abs(rec.matrix()[:, :n] - frame.gamma_prime.matrix()[:, :n])))


class FrameField:
    """Frames of one surface along the x axis, oriented continuously with the germ.

    Away from the germ ``xi_d`` is ``xi_bar' / |xi_bar'|`` up to sign; for odd
    germ multiplicity ``k`` the smooth extension flips sign for ``x < 0``.
    """

    def __init__(self, spec, germ_frame=None):
        self.spec = spec
        self._germ = germ_frame
        self._germ_k = None if germ_frame is None else germ_frame.k
        self._cache = {}

    @property
    def germ(self):
        if self._germ is None:
            self._germ = compute_frame(self.spec, 0.0)
            self._germ_k = self._germ.k
        return self._germ

    def orientation(self, x):
        if self._germ_k is None:
            try:
                self.germ
            except (NotFiniteMultiplicity, DegenerateDirector, JetError):
                self._germ_k = 0
        return -1 if (x < 0 and self._germ_k % 2 == 1) else 1

    def at(self, x, order=None):
        x = float(x)
        if x == 0.0 and order is None:
            return self.germ
        order = min(self.spec.jet_order, GRID_ORDER) if order is None else order
        key = (x, order)
        fr = self._cache.get(key)
        if fr is None:
            if x == 0.0:
                fr = compute_frame(self.spec, 0.0, order)
            else:
                fr = compute_frame(self.spec, x, order, self.orientation(x), self._germ_k)
            if len(self._cache) > 20000:
                self._cache.clear()
            self._cache[key] = fr
        return fr

    def t_value(self, x):
        fr = self.at(x)
        if fr.t is None:
            raise StrictionUndefined(f"pre-striction function undefined at x={x}")
        return fr.t.value

    def striction_point(self, x):
        return striction_curve(self.spec, self, x)


def striction_curve(spec, field_or_frame, x):
    """Point ``s(x) = gamma(x) + t(x) xi_bar(x)`` on the striction curve."""
    if isinstance(field_or_frame, FrameField):
        fr = field_or_frame.at(x)
    else:
        fr = field_or_frame
        if fr.x0 != x:
            fr = compute_frame(spec, x, min(spec.jet_order, GRID_ORDER))
    if fr.t is None:
        raise StrictionUndefined(f"striction curve undefined at x={x}")
    return spec.gamma_real(x) + fr.t.value * fr.xi_bar.value()
