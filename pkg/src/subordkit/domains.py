"""Target domains h(D) for the univalent maps used throughout the package.

Unbounded images (half-planes, sectors) and Möbius discs get closed-form
membership predicates.  Bounded transcendental images are handled through a
boundary polyline; every such catalog entry is star-shaped with respect to
h(0), so membership reduces to comparing |w - h(0)| with the boundary radius
in the direction of w, found by a safeguarded Newton solve on the exact map.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import fncat
from .errors import EvaluationError, NotConvexError, ParameterError

EPS_BOUNDARY = 1e-9
DEFAULT_RESOLUTION = 4096
SCAN_POINTS = 100_000
MAX_TURN_DEG = 5.0

Q_ASSUMPTION = ("boundary assumed to consist of finitely many smooth arcs "
                "(class Q membership not verified)")


class Verdict(enum.IntEnum):
    OUTSIDE = -1
    BOUNDARY = 0
    INSIDE = 1

    def __str__(self):
        return self.name.lower()


@dataclass(frozen=True, eq=False)
class TargetDomain:
    name: str
    params: dict
    map: fncat.AnalyticMap
    convex: bool
    corner_params: tuple
    kind: str
    h0: complex
    re_inf: float
    re_sup: float
    boundary: fncat.Polyline
    shape: dict = field(default_factory=dict)
    notes: tuple = ()

    def __repr__(self):
        return f"TargetDomain({self.name}, {self.params})"

    @property
    def label(self):
        if not self.params:
            return self.name
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({args})"

    def classify(self, w):
        return classify(self, w)


# --------------------------------------------------------------------------
# catalog


def _catalog_entry(name, params):
    if name == "halfplane":
        alpha = float(params.get("alpha", 0.0))
        if not 0 <= alpha < 1:
            raise ParameterError("halfplane needs 0 <= alpha < 1")
        return dict(map=fncat.moebius(1 - 2 * alpha, -1), convex=True, corners=(0.0,),
                    kind="halfplane", shape={"threshold": alpha},
                    extremes=(alpha, math.inf), params={"alpha": alpha})
    if name == "janowski":
        A, B = float(params["A"]), float(params["B"])
        if not -1 <= B < A <= 1:
            raise ParameterError("janowski needs -1 <= B < A <= 1")
        m = fncat.moebius(A, B)
        if B == -1:
            a = (1 - A) / 2
            return dict(map=m, convex=True, corners=(0.0,), kind="halfplane",
                        shape={"threshold": a}, extremes=(a, math.inf),
                        params={"A": A, "B": B})
        c = (1 - A * B) / (1 - B * B)
        r = (A - B) / (1 - B * B)
        return dict(map=m, convex=True, corners=(), kind="disk",
                    shape={"center": c, "radius": r}, extremes=(c - r, c + r),
                    params={"A": A, "B": B})
    if name == "power":
        gamma = float(params.get("gamma", 0.5))
        if not 0 < gamma <= 1:
            raise ParameterError("power needs 0 < gamma <= 1")
        corners = (0.0,) if gamma == 1 else (0.0, math.pi)
        return dict(map=fncat.power(fncat.moebius(1, -1), gamma), convex=True,
                    corners=corners, kind="sector", shape={"gamma": gamma},
                    extremes=(0.0, math.inf), params={"gamma": gamma})
    # corners carry their limiting boundary values
    simple = {
        "exp": (fncat.exp(), True, {}),
        "sqrt": (fncat.sqrt1p(), True, {math.pi: 0j}),
        "sigmoid": (fncat.sigmoid(), True, {}),
        "crescent": (fncat.crescent(), False, {math.pi / 2: 1j, 3 * math.pi / 2: -1j}),
        "sine": (fncat.sine(), False, {}),
        # h'(-1) = 0 for the cardioid polynomial; treated as a corner
        "cardioid": (fncat.polynomial([1, 4 / 3, 2 / 3]), False, {math.pi: 1 / 3 + 0j}),
    }
    if name not in simple:
        raise ParameterError(f"unknown catalog id {name!r}")
    if params:
        raise ParameterError(f"{name} takes no parameters")
    fmap, convex, corner_values = simple[name]
    return dict(map=fmap, convex=convex, corners=tuple(corner_values), kind="polyline",
                shape={}, extremes=None, params={}, corner_values=corner_values)


CATALOG = ("halfplane", "janowski", "power", "exp", "sqrt", "sigmoid",
           "crescent", "sine", "cardioid")
ALIASES = {"cardioid-poly": "cardioid", "lemniscate": "sqrt"}


def _turns(points):
    d = np.diff(points)
    ang = np.angle(d[1:] / d[:-1])
    return np.degrees(np.abs(ang))


def _build_polyline(fmap, corners, n):
    base = fncat.boundary_samples(fmap, n, corners)
    if not corners:
        return base
    theta = list(base.theta)
    step = 2 * np.pi / n
    for c in corners:
        for side in (-1, 1):
            added = []
            for j in range(1, 30):
                t = (c + side * step * 2.0**-j) % (2 * np.pi)
                added.append(t)
                pts = fmap(np.exp(1j * np.sort(np.asarray(added))))
                if len(added) >= 3 and (_turns(pts) < MAX_TURN_DEG).all():
                    break
            theta.extend(added)
    theta = np.unique(np.asarray(theta))
    return fncat.Polyline(theta, fmap(np.exp(1j * theta)))


def _re_extremes(fmap, corner_values):
    theta = np.linspace(0, 2 * np.pi, SCAN_POINTS, endpoint=False)
    f = fncat.evaluate(fmap, np.exp(1j * theta), strict=False)[0]
    re = f.real
    out = []
    for sign in (1, -1):
        vals = np.where(np.isfinite(re), sign * re, np.inf)
        k = int(np.argmin(vals))
        h = 2 * np.pi / SCAN_POINTS

        def obj(t):
            v = fncat.evaluate(fmap, np.exp(1j * t), strict=False)[0]
            return sign * v.real if np.isfinite(v) else np.inf

        res = minimize_scalar(obj, bounds=(theta[k] - h, theta[k] + h), method="bounded",
                              options={"xatol": 1e-13})
        best = min(vals[k], res.fun)
        for v in corner_values.values():
            best = min(best, sign * v.real)
        out.append(sign * best)
    return out[0], out[1]


def make_domain(name: str, resolution: int = DEFAULT_RESOLUTION, **params) -> TargetDomain:
    """Build a fully populated catalog domain.

    >>> make_domain("halfplane", alpha=0).re_inf
    0.0
    """
    name = ALIASES.get(name, name)
    entry = _catalog_entry(name, params)
    fmap = entry["map"]
    corners = tuple(float(c) % (2 * np.pi) for c in entry["corners"])
    h0 = fncat.evaluate(fmap, 0)[0]
    poly = _build_polyline(fmap, corners, resolution)
    if entry["extremes"] is None:
        re_inf, re_sup = _re_extremes(fmap, entry["corner_values"])
    else:
        re_inf, re_sup = entry["extremes"]
    shape = dict(entry["shape"])
    notes = ()
    kind = entry["kind"]
    if kind == "polyline":
        notes = (Q_ASSUMPTION,)
        phi = np.unwrap(np.angle(poly.points - h0))
        if np.all(np.diff(phi) > 0) and abs(phi[-1] - phi[0] - 2 * np.pi) < np.pi:
            shape["phi"] = phi
            shape["theta"] = np.unwrap(poly.theta)
        else:
            kind = "raycast"
    dom = TargetDomain(name=name, params=entry["params"], map=fmap, convex=entry["convex"],
                       corner_params=corners, kind=kind, h0=h0, re_inf=float(re_inf),
                       re_sup=float(re_sup), boundary=poly, shape=shape, notes=notes)
    if dom.convex and kind in ("polyline", "raycast"):
        if not polygon_is_convex(poly.points):
            raise AssertionError(f"{name} is flagged convex but its polyline is not")
    return dom


def from_config(cfg) -> TargetDomain:
    """``{"id": "janowski", "A": 0.5, "B": -0.5}`` or a bare catalog id."""
    if isinstance(cfg, str):
        return make_domain(cfg)
    cfg = dict(cfg)
    name = cfg.pop("id")
    from fractions import Fraction
    params = {k: float(Fraction(v)) if isinstance(v, str) else v for k, v in cfg.items()}
    return make_domain(name, **params)


# --------------------------------------------------------------------------
# geometry helpers


def polygon_is_convex(points, tol=1e-6) -> bool:
    """Cross-product sign test on a closed polyline.

    tol is relative (sine of the turn angle); sample values next to a corner
    carry ~1e-6 relative cancellation error, so a tighter tol misfires.
    """
    p = np.asarray(points)
    d = np.roll(p, -1) - p
    cross = (np.conj(d) * np.roll(d, -1)).imag
    scale = np.abs(d) * np.abs(np.roll(d, -1))
    return bool(np.all(cross >= -tol * np.maximum(scale, 1e-300)) or
                np.all(cross <= tol * np.maximum(scale, 1e-300)))


def crossing_number(points, w):
    """Even-odd ray-casting membership against a closed polyline (vectorised)."""
    p = np.asarray(points)
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    x0, y0 = p.real[None, :], p.imag[None, :]
    q = np.roll(p, -1)
    x1, y1 = q.real[None, :], q.imag[None, :]
    wx, wy = w.real[:, None], w.imag[:, None]
    straddle = (y0 > wy) != (y1 > wy)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = x0 + (wy - y0) * (x1 - x0) / (y1 - y0)
    hits = straddle & (wx < xcross)
    return (hits.sum(axis=1) % 2).astype(bool)


def distance_to_polyline(points, w):
    p = np.asarray(points)
    q = np.roll(p, -1)
    w = np.atleast_1d(np.asarray(w, dtype=complex))[:, None]
    d = q - p
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.clip(((w - p) * np.conj(d)).real / np.abs(d) ** 2, 0, 1)
    s = np.nan_to_num(s)
    return np.min(np.abs(w - (p + s * d)), axis=1)


def _boundary_radius(dom, psi, seed_theta, lo, hi, iters=60):
    """Solve arg((h(e^{iθ}) - h0) e^{-iψ}) = 0 for θ in [lo, hi]."""
    fmap, h0 = dom.map, dom.h0
    rot = np.exp(-1j * psi)
    t = seed_theta.copy()
    lo, hi = lo.copy(), hi.copy()
    for _ in range(iters):
        zeta = np.exp(1j * t)
        f, f1, _, bad = fncat.evaluate_masked(fmap, zeta)
        g = np.angle((f - h0) * rot)
        dg = ((zeta * f1) / (f - h0)).real
        # g increases with θ on the bracket
        lo = np.where(~bad & (g < 0), t, lo)
        hi = np.where(~bad & (g > 0), t, hi)
        with np.errstate(all="ignore"):
            step = t - g / dg
        ok = ~bad & np.isfinite(step) & (step > lo) & (step < hi)
        new = np.where(ok, step, 0.5 * (lo + hi))
        if np.all(np.abs(new - t) <= 1e-15 * (1 + np.abs(t))):
            t = new
            break
        t = new
    f = fncat.evaluate_masked(fmap, np.exp(1j * t))[0]
    return np.abs(f - h0)


def signed_gap(dom: TargetDomain, w, refine=True):
    """Signed distance-like gap to the boundary: positive inside, negative outside.

    For polyline domains this is the radial gap along the ray from h(0);
    ``refine=False`` skips the exact boundary solve and returns the chord
    estimate, which is only trustworthy far from the boundary.
    """
    w = np.asarray(w, dtype=complex)
    kind = dom.kind
    if kind == "halfplane":
        return w.real - dom.shape["threshold"]
    if kind == "disk":
        return dom.shape["radius"] - np.abs(w - dom.shape["center"])
    if kind == "sector":
        half = dom.shape["gamma"] * np.pi / 2
        delta = half - np.abs(np.angle(w))
        return np.where(np.abs(delta) < np.pi / 2, np.abs(w) * np.sin(delta),
                        np.sign(delta) * np.abs(w))
    if kind == "raycast":
        inside = crossing_number(dom.boundary.points, w.ravel())
        dist = distance_to_polyline(dom.boundary.points, w.ravel())
        return np.where(inside, dist, -dist).reshape(w.shape)
    return _polar_gap(dom, w, refine)


def _polar_gap(dom, w, refine=True):
    shape = w.shape
    w = w.ravel()
    phi = dom.shape["phi"]
    theta = dom.shape["theta"]
    pts = dom.boundary.points
    n = len(phi)
    rel = w - dom.h0
    r = np.abs(rel)
    psi = np.angle(rel)
    psi_u = phi[0] + np.mod(psi - phi[0], 2 * np.pi)
    # cyclic extension so that every direction has a bracketing segment
    phi_ext = np.append(phi, phi[0] + 2 * np.pi)
    th_ext = np.append(theta, theta[0] + 2 * np.pi)
    pts_ext = np.append(pts, pts[0])
    k = np.clip(np.searchsorted(phi_ext, psi_u, side="right") - 1, 0, n - 1)
    frac = (psi_u - phi_ext[k]) / (phi_ext[k + 1] - phi_ext[k])
    seed = th_ext[k] + frac * (th_ext[k + 1] - th_ext[k])
    # ray/chord intersection as a cheap first estimate
    a, b = pts_ext[k] - dom.h0, pts_ext[k + 1] - dom.h0
    u = np.exp(1j * psi)
    with np.errstate(all="ignore"):
        cross = lambda p, q: (np.conj(p) * q).imag
        R = cross(a, b - a) / cross(u, b - a)
    R = np.where(np.isfinite(R), R, np.abs(a))
    gap = R - r
    unsure = np.abs(gap) < 1e-3 * (1 + np.abs(w))
    if refine and unsure.any():
        idx = np.flatnonzero(unsure)
        R_exact = _boundary_radius(dom, psi[idx], seed[idx], th_ext[k[idx]], th_ext[k[idx] + 1])
        gap[idx] = R_exact - r[idx]
    gap = np.where(r == 0, np.abs(pts - dom.h0).min(), gap)
    return gap.reshape(shape)


def classify(dom: TargetDomain, w, eps=EPS_BOUNDARY):
    """Vectorised verdicts as integers (1 inside, 0 boundary, -1 outside)."""
    w = np.asarray(w, dtype=complex)
    gap = signed_gap(dom, w)
    tol = eps * (1 + np.abs(w))
    out = np.where(gap > tol, 1, np.where(gap < -tol, -1, 0))
    out = np.where(np.isfinite(w), out, -1)
    return out


def clearly_outside(dom: TargetDomain, w, margin=1e-3):
    """True where w is outside by more than ``margin (1 + |w|)`` (cheap test)."""
    w = np.asarray(w, dtype=complex)
    gap = signed_gap(dom, w, refine=False)
    return (gap < -margin * (1 + np.abs(w))) | ~np.isfinite(w)


def contains(dom: TargetDomain, w, eps=EPS_BOUNDARY) -> Verdict:
    return Verdict(int(classify(dom, complex(w), eps)))


def support_halfplane(dom: TargetDomain, boundary_angle: float):
    """Supporting line of a convex domain at h(e^{iθ}).

    Returns ``(point, inward_normal)``: the domain lies in
    ``{w : Re((w - point) * conj(inward_normal)) >= 0}``.  The outward normal
    of a convex conformal image at h(ζ) points along ζ h'(ζ).
    """
    if not dom.convex:
        raise NotConvexError(f"{dom.name} is not convex")
    if fncat._near_corner(np.array([boundary_angle % (2 * np.pi)]), dom.corner_params, 1e-9)[0]:
        raise EvaluationError(f"angle {boundary_angle} is a declared corner", boundary_angle)
    zeta = complex(np.exp(1j * boundary_angle))
    f, f1, _ = fncat.evaluate(dom.map, zeta)
    outward = zeta * f1
    return f, -outward / abs(outward)


def support_margin(dom: TargetDomain, boundary_angle: float, samples=None):
    """Smallest scaled signed distance of boundary samples to the supporting line."""
    point, normal = support_halfplane(dom, boundary_angle)
    w = dom.boundary.points if samples is None else np.asarray(samples)
    s = ((w - point) * np.conj(normal)).real
    return float(np.min(s / (1 + np.abs(w) + abs(point))))
