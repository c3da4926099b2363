"""Catalog of closed-form analytic maps with exact first and second derivatives.

Every map is an immutable expression tree.  Evaluation is vectorised over
numpy arrays and always returns the triple ``(f, f', f'')``; derivative rules
are applied per node through the chain rule, so no finite differences are
involved anywhere except in :func:`fd_residual`, which exists to check them.

Principal branches are used for every root and power.  A node whose inner
value lands exactly on the negative real axis raises :class:`BranchCutError`
instead of silently picking a side.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import BranchCutError, EvaluationError, OutsideDiskError, PoleError

DISK_SLACK = 1e-12

_UNARY = {"affine", "moebius", "exp", "sqrt1p", "power", "sigmoid", "sine",
          "crescent", "polynomial", "scale"}
_BINARY = {"sum", "product", "quotient"}
_LEAF = {"constant", "identity"}
OPS = _UNARY | _BINARY | _LEAF


@dataclass(frozen=True, eq=False)
class AnalyticMap:
    """A node of an analytic expression tree.

    ``args`` holds child maps (the inner argument for unary constructors, both
    operands for binary ones) and ``params`` the numeric constants of the node.
    Use the module-level constructors rather than instantiating directly.
    """

    op: str
    args: tuple = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown constructor {self.op!r}")
        if self.op in _BINARY and len(self.args) != 2:
            raise ValueError(f"{self.op} takes exactly two operands")
        if self.op in _UNARY and len(self.args) != 1:
            raise ValueError(f"{self.op} takes exactly one inner map")
        if self.op == "scale" and abs(self.params["c"]) > 1 + DISK_SLACK:
            raise ValueError("compose-with-scale requires |c| <= 1")

    def __call__(self, z):
        return evaluate(self, z)[0]

    def __add__(self, other):
        return AnalyticMap("sum", (self, _lift(other)))

    __radd__ = __add__

    def __mul__(self, other):
        return AnalyticMap("product", (self, _lift(other)))

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.0) * _lift(other)

    def __rsub__(self, other):
        return _lift(other) + (-1.0) * self

    def __truediv__(self, other):
        return AnalyticMap("quotient", (self, _lift(other)))

    def __rtruediv__(self, other):
        return AnalyticMap("quotient", (_lift(other), self))

    def __repr__(self):
        return f"AnalyticMap({to_json(self)})"

    @property
    def is_zero(self):
        return self.op == "constant" and self.params["value"] == 0

    def to_json(self):
        return to_json(self)


def _lift(value):
    if isinstance(value, AnalyticMap):
        return value
    return constant(value)


def _inner(inner):
    return identity() if inner is None else inner


def constant(value) -> AnalyticMap:
    return AnalyticMap("constant", (), {"value": complex(value) if isinstance(value, complex) else float(value)})


def identity() -> AnalyticMap:
    return AnalyticMap("identity")


def affine(a, b, inner=None) -> AnalyticMap:
    """``a + b*u``."""
    return AnalyticMap("affine", (_inner(inner),), {"a": a, "b": b})


def moebius(A, B, inner=None) -> AnalyticMap:
    """``(1 + A*u) / (1 + B*u)``."""
    return AnalyticMap("moebius", (_inner(inner),), {"A": float(A), "B": float(B)})


def exp(inner=None) -> AnalyticMap:
    return AnalyticMap("exp", (_inner(inner),))


def sqrt1p(inner=None) -> AnalyticMap:
    """Principal ``sqrt(1 + u)``."""
    return AnalyticMap("sqrt1p", (_inner(inner),))


def power(base: AnalyticMap, exponent) -> AnalyticMap:
    """Principal ``base ** exponent``."""
    return AnalyticMap("power", (base,), {"exponent": float(exponent)})


def sigmoid(inner=None) -> AnalyticMap:
    """``2 / (1 + exp(-u))``."""
    return AnalyticMap("sigmoid", (_inner(inner),))


def sine(inner=None) -> AnalyticMap:
    """``1 + sin(u)``."""
    return AnalyticMap("sine", (_inner(inner),))


def crescent(inner=None) -> AnalyticMap:
    """``u + sqrt(1 + u**2)``."""
    return AnalyticMap("crescent", (_inner(inner),))


def polynomial(coeffs, inner=None) -> AnalyticMap:
    """Polynomial with ascending coefficients ``coeffs[0] + coeffs[1]*u + ...``."""
    coeffs = tuple(complex(c) if isinstance(c, complex) else float(c) for c in coeffs)
    if not coeffs:
        raise ValueError("polynomial needs at least one coefficient")
    return AnalyticMap("polynomial", (_inner(inner),), {"coeffs": coeffs})


def scale(f: AnalyticMap, c) -> AnalyticMap:
    """``z -> f(c*z)`` with ``|c| <= 1``."""
    return AnalyticMap("scale", (f,), {"c": c})


def substitute(f: AnalyticMap, inner: AnalyticMap) -> AnalyticMap:
    """Return ``f∘inner`` by replacing every identity leaf of ``f``."""
    if f.op == "identity":
        return inner
    if f.op == "constant":
        return f
    if f.op == "scale":
        return substitute(f.args[0], affine(0.0, f.params["c"], inner))
    return AnalyticMap(f.op, tuple(substitute(a, inner) for a in f.args), dict(f.params))


# --------------------------------------------------------------------------
# evaluation


class _Flags:
    __slots__ = ("cut", "pole")

    def __init__(self, shape):
        self.cut = np.zeros(shape, dtype=bool)
        self.pole = np.zeros(shape, dtype=bool)


def _chain(F, F1, F2, inner):
    g, g1, g2 = inner
    return F, F1 * g1, F2 * g1 * g1 + F1 * g2


def _check_cut(w, flags):
    on_cut = (w.imag == 0) & (w.real < 0)
    flags.cut |= on_cut
    zero = w == 0
    flags.pole |= zero
    return on_cut | zero


def _eval(node, z, flags):
    op = node.op
    p = node.params
    if op == "constant":
        v = np.full(z.shape, p["value"], dtype=complex)
        zero = np.zeros(z.shape, dtype=complex)
        return v, zero, zero.copy()
    if op == "identity":
        return z.copy(), np.ones(z.shape, dtype=complex), np.zeros(z.shape, dtype=complex)
    if op in _BINARY:
        f, f1, f2 = _eval(node.args[0], z, flags)
        g, g1, g2 = _eval(node.args[1], z, flags)
        if op == "sum":
            return f + g, f1 + g1, f2 + g2
        if op == "product":
            return f * g, f1 * g + f * g1, f2 * g + 2 * f1 * g1 + f * g2
        bad = g == 0
        flags.pole |= bad
        g = np.where(bad, np.nan, g)
        q = f / g
        q1 = (f1 - q * g1) / g
        q2 = (f2 - 2 * q1 * g1 - q * g2) / g
        return q, q1, q2
    if op == "scale":
        c = p["c"]
        f, f1, f2 = _eval(node.args[0], c * z, flags)
        return f, c * f1, c * c * f2

    inner = _eval(node.args[0], z, flags)
    u = inner[0]
    if op == "affine":
        a, b = p["a"], p["b"]
        return _chain(a + b * u, np.full(u.shape, b, dtype=complex), np.zeros(u.shape, dtype=complex), inner)
    if op == "moebius":
        A, B = p["A"], p["B"]
        den = 1 + B * u
        bad = den == 0
        flags.pole |= bad
        den = np.where(bad, np.nan, den)
        F = (1 + A * u) / den
        F1 = (A - B) / den**2
        F2 = -2 * B * (A - B) / den**3
        return _chain(F, F1, F2, inner)
    if op == "exp":
        e = np.exp(u)
        return _chain(e, e, e, inner)
    if op == "sqrt1p":
        w = 1 + u
        w = np.where(_check_cut(w, flags), np.nan, w)
        s = np.sqrt(w)
        return _chain(s, 0.5 / s, -0.25 / (s * w), inner)
    if op == "power":
        gamma = p["exponent"]
        b = u
        if float(gamma).is_integer() and gamma >= 0:
            n = int(gamma)
            F = b**n
            F1 = n * b ** max(n - 1, 0) if n >= 1 else np.zeros_like(b)
            F2 = n * (n - 1) * b ** max(n - 2, 0) if n >= 2 else np.zeros_like(b)
            return _chain(F, F1, F2, inner)
        b = np.where(_check_cut(b, flags), np.nan, b)
        F = np.exp(gamma * np.log(b))
        F1 = gamma * F / b
        F2 = gamma * (gamma - 1) * F / (b * b)
        return _chain(F, F1, F2, inner)
    if op == "sigmoid":
        e = np.exp(-u)
        den = 1 + e
        bad = den == 0
        flags.pole |= bad
        den = np.where(bad, np.nan, den)
        F = 2 / den
        F1 = 2 * e / den**2
        F2 = 2 * e * (e - 1) / den**3
        return _chain(F, F1, F2, inner)
    if op == "sine":
        return _chain(1 + np.sin(u), np.cos(u), -np.sin(u), inner)
    if op == "crescent":
        w = 1 + u * u
        w = np.where(_check_cut(w, flags), np.nan, w)
        s = np.sqrt(w)
        return _chain(u + s, 1 + u / s, 1 / (s * w), inner)
    if op == "polynomial":
        c = np.asarray(p["coeffs"], dtype=complex)
        P = np.polynomial.polynomial
        d1 = P.polyder(c) if len(c) > 1 else np.zeros(1)
        d2 = P.polyder(d1) if len(d1) > 1 else np.zeros(1)
        return _chain(P.polyval(u, c), P.polyval(u, d1) + 0j, P.polyval(u, d2) + 0j, inner)
    raise AssertionError(op)


def evaluate_masked(fmap: AnalyticMap, z):
    """Evaluate without raising: returns ``(f, f', f'', bad)``; bad entries are NaN."""
    z = np.asarray(z, dtype=complex)
    flags = _Flags(z.shape)
    with np.errstate(all="ignore"):
        f, f1, f2 = _eval(fmap, z, flags)
    bad = flags.cut | flags.pole | ~np.isfinite(f) | ~np.isfinite(f1) | ~np.isfinite(f2)
    if bad.any():
        f, f1, f2 = (np.where(bad, np.nan, a) for a in (f, f1, f2))
    return f, f1, f2, bad


def evaluate(fmap: AnalyticMap, z, *, strict=True, allow_outside=False):
    """Return ``(f(z), f'(z), f''(z))``.

    Scalar input gives Python complex numbers, array input gives arrays of
    the same shape.  With ``strict`` any branch-cut hit, pole or non-finite
    result raises; otherwise the offending entries are NaN.
    """
    scalar = np.ndim(z) == 0
    za = np.asarray(z, dtype=complex)
    if not allow_outside:
        outside = np.abs(za) > 1 + DISK_SLACK
        if outside.any():
            where = za[outside].ravel()[0]
            raise OutsideDiskError(f"|z| > 1 at z={where}", where)
    flags = _Flags(za.shape)
    with np.errstate(all="ignore"):
        f, f1, f2 = _eval(fmap, za, flags)
    finite = np.isfinite(f) & np.isfinite(f1) & np.isfinite(f2)
    if strict:
        for mask, exc, what in ((flags.cut, BranchCutError, "branch cut"),
                                (flags.pole, PoleError, "pole"),
                                (~finite, PoleError, "non-finite value")):
            if mask.any():
                where = complex(za[mask].ravel()[0])
                raise exc(f"{what} at z={where}", where)
    else:
        bad = flags.cut | flags.pole | ~finite
        f, f1, f2 = (np.where(bad, np.nan, a) for a in (f, f1, f2))
    if scalar:
        return complex(f), complex(f1), complex(f2)
    return f, f1, f2


def fd_residual(fmap: AnalyticMap, z, h=1e-5) -> float:
    """Largest relative gap between analytic derivatives and central differences.

    f' is compared with differences of f, and f'' with differences of the
    analytic f'; both use the four-point stencil z±h, z±ih.  The deviation is
    measured relative to ``max(|analytic|, 1)``.
    """
    z = complex(z)
    if not h > 1e-12 * max(1.0, abs(z)) or z + h == z:
        raise EvaluationError(f"finite-difference step {h} underflows at z={z}", z)
    stencil = np.array([z + h, z - h, z + 1j * h, z - 1j * h])
    f, f1, f2 = evaluate(fmap, z, allow_outside=True)
    fs, f1s, _ = evaluate(fmap, stencil, allow_outside=True)
    d1 = ((fs[0] - fs[1]) - 1j * (fs[2] - fs[3])) / (4 * h)
    d2 = ((f1s[0] - f1s[1]) - 1j * (f1s[2] - f1s[3])) / (4 * h)
    r1 = abs(f1 - d1) / max(abs(f1), 1.0)
    r2 = abs(f2 - d2) / max(abs(f2), 1.0)
    return max(r1, r2)


class Polyline(NamedTuple):
    theta: np.ndarray
    points: np.ndarray


def _near_corner(theta, corners, tol=1e-12):
    if not len(corners):
        return np.zeros(np.shape(theta), dtype=bool)
    t = np.asarray(theta)[..., None]
    c = np.asarray(corners, dtype=float)
    d = np.abs((t - c + np.pi) % (2 * np.pi) - np.pi)
    return (d < tol).any(axis=-1)


def boundary_samples(fmap: AnalyticMap, n: int, corners=()) -> Polyline:
    """``fmap(e^{2πik/n})`` for k = 0..n-1 with declared corner angles skipped."""
    if n < 4:
        raise ValueError("need at least 4 boundary samples")
    theta = 2 * np.pi * np.arange(n) / n
    keep = ~_near_corner(theta, corners)
    theta = theta[keep]
    zeta = np.exp(1j * theta)
    f, _, _ = evaluate(fmap, zeta)
    return Polyline(theta, f)


@dataclass(frozen=True)
class DiskGrid:
    radii: tuple
    angular_count: int
    include_boundary_param: bool = False

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if any(not 0 < r < 1 for r in radii):
            raise ValueError("radii must lie in (0, 1)")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly increasing")
        if self.angular_count < 1:
            raise ValueError("angular_count must be positive")
        object.__setattr__(self, "radii", radii)

    def angles(self):
        return 2 * np.pi * np.arange(self.angular_count) / self.angular_count

    def points(self):
        """Grid points as a ``(len(radii) [+1], angular_count)`` complex array."""
        radii = self.radii + ((1.0,) if self.include_boundary_param else ())
        return np.asarray(radii)[:, None] * np.exp(1j * self.angles())[None, :]


# --------------------------------------------------------------------------
# JSON


def _encode(v):
    if isinstance(v, (tuple, list)):
        return [_encode(x) for x in v]
    if isinstance(v, complex):
        return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v


def _decode(v):
    if isinstance(v, list):
        return tuple(_decode(x) for x in v)
    if isinstance(v, dict):
        return complex(v["re"], v["im"])
    if isinstance(v, str):
        return float(Fraction(v))
    return v


def to_json(fmap: AnalyticMap) -> dict:
    return {"op": fmap.op,
            "args": [to_json(a) for a in fmap.args],
            "params": {k: _encode(v) for k, v in fmap.params.items()}}


def from_json(data) -> AnalyticMap:
    if isinstance(data, str):
        data = json.loads(data)
    op = data["op"]
    if op not in OPS:
        raise ValueError(f"unknown constructor {op!r}")
    args = tuple(from_json(a) for a in data.get("args", []))
    params = {k: _decode(v) for k, v in data.get("params", {}).items()}
    if op in _UNARY and not args:
        args = (identity(),)
    if op == "constant":
        return constant(params.get("value", 0.0))
    if op == "polynomial":
        return polynomial(params["coeffs"], args[0])
    return AnalyticMap(op, args, params)


def catalog_constructors():
    """One representative map per constructor, used by derivative sweeps."""
    return {
        "constant": constant(2.5 - 1j),
        "identity": identity(),
        "affine": affine(1.0, 0.5 - 0.25j),
        "moebius": moebius(0.375, -0.5),
        "exp": exp(),
        "sqrt1p": sqrt1p(),
        "power": power(moebius(1, -1), 0.5),
        "sigmoid": sigmoid(),
        "sine": sine(),
        "crescent": crescent(),
        "polynomial": polynomial([1, 1, 1, 0.5]),
        "sum": exp() + sine(),
        "product": exp() * sqrt1p(),
        "quotient": sine() / exp(),
        "scale": scale(sigmoid(), 0.5 + 0.5j),
    }

