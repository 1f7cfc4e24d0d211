"""Scene files: a TOML document naming the director, the base curve and options.

    name = "g2"
    xi = ["1", "x^3", "x^4"]
    gamma = ["0", "3*x", "2*x^2"]          # or: gamma_prime = [...] and gamma0 = [...]

    [options]
    jet_order = 12
    tol = 1e-9
    x_range = [-1.0, 1.0]
    t_range = [-2.0, 2.0]
    resolution = [401, 401]
"""

import os
import sys
from dataclasses import dataclass, replace

from .errors import ExpressionError, InvalidResolution, SceneError, UnknownExample
from .frame import SurfaceSpec
from .jets import DEFAULT_ORDER, ZERO_TOL

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass(frozen=True)
class SceneOptions:
    x_range: tuple = (-1.0, 1.0)
    t_range: tuple = (-2.0, 2.0)
    resolution: tuple = (401, 401)

    def __post_init__(self):
        for name in ("x_range", "t_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise SceneError(f"{name} must be a nonempty interval, got [{lo}, {hi}]")
        nx, nt = self.resolution
        if nx < 2 or nt < 2:
            raise InvalidResolution(f"resolution must be at least 2 per axis, got {nx}x{nt}")

    def to_dict(self):
        return {
            "x_range": list(self.x_range),
            "t_range": list(self.t_range),
            "resolution": list(self.resolution),
        }


@dataclass(frozen=True)
class Scene:
    spec: SurfaceSpec
    options: SceneOptions
    source: str = ""

    @property
    def name(self):
        return self.spec.name


_S3 = "sqrt(1+x^8+x^10)"
# smooth unit direction of xi_3' (the raw normalized derivative flips sign at 0)
_V3 = ("(-4*x^4-5*x^6)", "(4-x^10)", "(5*x+x^9)")
_N3 = "sqrt((-4*x^4-5*x^6)^2+(4-x^10)^2+(5*x+x^9)^2)"


def _vec(items):
    return "[" + ", ".join(f'"{s}"' for s in items) + "]"


_OPTIONS = """
[options]
jet_order = 12
tol = 1e-9
x_range = [-1.0, 1.0]
t_range = [-2.0, 2.0]
resolution = [401, 401]
"""

BUILTINS = {
    "g1": f'name = "g1"\nxi = {_vec(["1", "x", "0"])}\ngamma = {_vec(["0", "0", "x^2"])}\n' + _OPTIONS,
    "g2": f'name = "g2"\nxi = {_vec(["1", "x^3", "x^4"])}\ngamma = {_vec(["0", "3*x", "2*x^2"])}\n'
    + _OPTIONS,
    "g3": f'name = "g3"\nxi = {_vec(["1", "x^3", "x^4"])}\n'
    f'gamma = {_vec(["0", "3/2*x^2", "4/3*x^3"])}\n' + _OPTIONS,
    "g4": f'name = "g4"\nxi = {_vec(["1/" + _S3, "x^4/" + _S3, "x^5/" + _S3])}\n'
    f'gamma_prime = {_vec([v + "/" + _N3 for v in _V3])}\ngamma0 = [0.0, 0.0, 0.0]\n' + _OPTIONS,
    "g5": f'name = "g5"\nxi = {_vec(["1/" + _S3, "x^4/" + _S3, "x^5/" + _S3])}\n'
    f'gamma_prime = {_vec(["x*" + v + "/" + _N3 for v in _V3])}\ngamma0 = [0.0, 0.0, 0.0]\n'
    + _OPTIONS,
}


def builtin_text(name):
    try:
        return BUILTINS[name]
    except KeyError:
        raise UnknownExample(
            f"unknown example {name!r}; choose one of {', '.join(sorted(BUILTINS))}"
        ) from None


def _strings(doc, key, n=3):
    v = doc.get(key)
    if not isinstance(v, list) or len(v) != n or not all(isinstance(s, str) for s in v):
        raise SceneError(f"'{key}' must be a list of {n} expression strings")
    return v


def _floats(v, key, n):
    if not isinstance(v, list) or len(v) != n or not all(isinstance(a, (int, float)) for a in v):
        raise SceneError(f"'{key}' must be a list of {n} numbers")
    return tuple(float(a) for a in v)


def parse_scene(text, source="<string>", overrides=None):
    """Parse scene text; ``overrides`` (from the command line) win over the file's options."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SceneError(f"{source}: invalid scene file: {exc}") from None
    known = {"name", "xi", "gamma", "gamma_prime", "gamma0", "options"}
    extra = sorted(set(doc) - known)
    if extra:
        raise SceneError(f"{source}: unknown keys {extra}")
    has_g, has_gp = "gamma" in doc, "gamma_prime" in doc
    if has_g == has_gp:
        raise SceneError(f"{source}: exactly one of 'gamma' or 'gamma_prime' is required")
    if has_g and "gamma0" in doc:
        raise SceneError(f"{source}: 'gamma0' only applies with 'gamma_prime'")
    opts = doc.get("options", {})
    if not isinstance(opts, dict):
        raise SceneError(f"{source}: [options] must be a table")
    bad = sorted(set(opts) - {"jet_order", "tol", "x_range", "t_range", "resolution"})
    if bad:
        raise SceneError(f"{source}: unknown options {bad}")
    opts = dict(opts)
    opts.update({k: v for k, v in (overrides or {}).items() if v is not None})

    jet_order = opts.get("jet_order", DEFAULT_ORDER)
    tol = opts.get("tol", ZERO_TOL)
    if not isinstance(jet_order, int) or isinstance(jet_order, bool):
        raise SceneError("jet_order must be an integer")
    if not isinstance(tol, (int, float)):
        raise SceneError("tol must be a number")
    x_range = _floats(list(opts.get("x_range", [-1.0, 1.0])), "x_range", 2)
    t_range = _floats(list(opts.get("t_range", [-2.0, 2.0])), "t_range", 2)
    res = opts.get("resolution", [401, 401])
    if not isinstance(res, (list, tuple)) or len(res) != 2 or not all(isinstance(a, int) for a in res):
        raise SceneError("resolution must be two integers")
    options = SceneOptions(x_range, t_range, (int(res[0]), int(res[1])))

    name = doc.get("name", os.path.splitext(os.path.basename(source))[0])
    xi = _strings(doc, "xi")
    kw = dict(jet_order=jet_order, tol=float(tol), name=str(name))
    try:
        if has_g:
            spec = SurfaceSpec.from_strings(xi, gamma=_strings(doc, "gamma"), **kw)
        else:
            g0 = _floats(doc.get("gamma0", [0.0, 0.0, 0.0]), "gamma0", 3)
            spec = SurfaceSpec.from_strings(xi, gamma_prime=_strings(doc, "gamma_prime"), gamma0=g0, **kw)
    except ExpressionError as exc:
        exc.args = (f"{source}: {exc.args[0] if exc.args else exc}",)
        raise
    return Scene(spec, options, source)


def load_scene(path_or_name, overrides=None):
    """Read a scene file, or a built-in example name when no such file exists."""
    if not os.path.exists(path_or_name) and path_or_name in BUILTINS:
        return parse_scene(BUILTINS[path_or_name], f"<builtin {path_or_name}>", overrides)
    with open(path_or_name, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_scene(text, path_or_name, overrides)


def with_options(scene, **kw):
    return replace(scene, options=replace(scene.options, **kw))
