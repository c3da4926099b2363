"""Convex weighted Pythagorean means and the harmonic-mean operator.

Weight conventions follow the usual definitions

    A_t(x, y) = (1-t) x + t y
    G_t(x, y) = x**t * y**(1-t)
    H_t(x, y) = x y / (t y + (1-t) x)

and the operator on analytic functions

    P_t(z) = (1 - t + t Θ(z)) f(z) + t Φ(z) z f'(z)
    H_t(z) = P_0(z) P_1(z) / P_{1-t}(z).

Because P_{1-t} = t P_0 + (1-t) P_1 identically, ``h_operator(t)`` equals
``harm_mean(1-t, P_0, P_1)``; both entry points are kept.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from . import fncat
from .errors import BranchCutError, NonRemovableSingularity, PoleError

EPS_DEN = 1e-10
LIMIT_DISTANCES = (1e-3, 1e-4, 1e-5)
LIMIT_RAY_TOL = 1e-6


class NearSingular(complex):
    """A mean value computed across a nearly vanishing denominator."""

    near_singular = True


def _check_weight(t):
    if not 0 <= t <= 1:
        raise ValueError(f"weight t={t} outside [0, 1]")


def arith_mean(t, x, y):
    _check_weight(t)
    return (1 - t) * x + t * y


def geo_mean(t, x, y):
    """Principal-branch ``x**t * y**(1-t)``."""
    _check_weight(t)
    x, y = complex(x), complex(y)
    if x == y:
        return x
    out = 1 + 0j
    for base, e in ((x, t), (y, 1 - t)):
        if e == 0:
            continue
        if base == 0:
            if e <= 0:
                raise PoleError("zero base with non-positive exponent")
            return 0j
        if base.imag == 0 and base.real < 0 and not float(e).is_integer():
            raise BranchCutError(f"{base} lies on the principal branch cut")
        out *= cmath.exp(e * cmath.log(base))
    return out


def harm_mean(t, x, y, eps=EPS_DEN):
    """``x y / (t y + (1-t) x)``.

    A denominator smaller than ``eps * (|x| + |y|)`` yields a
    :class:`NearSingular` value (which is 0 when the numerator vanishes too).
    """
    _check_weight(t)
    x, y = complex(x), complex(y)
    num = x * y
    den = t * y + (1 - t) * x
    if den == 0:
        if num != 0:
            raise PoleError(f"harmonic mean has a pole at x={x}, y={y}, t={t}")
        return NearSingular(0)
    if abs(den) < eps * (abs(x) + abs(y)):
        return NearSingular(num / den)
    return num / den


@dataclass(frozen=True)
class ThetaPhiPair:
    theta: fncat.AnalyticMap
    phi: fncat.AnalyticMap

    def __post_init__(self):
        t0 = fncat.evaluate(self.theta, 0)[0]
        if abs(t0 - 1) > 1e-12:
            raise ValueError(f"Theta(0) must equal 1, got {t0}")

    @classmethod
    def unit(cls):
        one = fncat.constant(1.0)
        return cls(one, one)


def _p_from_values(theta, phi, t, z, f, f1):
    return (1 - t + t * theta) * f + t * phi * z * f1


def p_operator(pair: ThetaPhiPair, f: fncat.AnalyticMap, t, z):
    """``(1 - t + tΘ) f + t Φ z f'`` evaluated at ``z`` (scalar or array)."""
    _check_weight(t)
    th = fncat.evaluate(pair.theta, z)[0]
    ph = fncat.evaluate(pair.phi, z)[0]
    fv, f1, _ = fncat.evaluate(f, z)
    return _p_from_values(th, ph, t, np.asarray(z) if np.ndim(z) else z, fv, f1)


def _ratio_parts(pair, f, t, z):
    z = np.asarray(z, dtype=complex)
    th = fncat.evaluate(pair.theta, z, allow_outside=True)[0]
    ph = fncat.evaluate(pair.phi, z, allow_outside=True)[0]
    fv, f1, _ = fncat.evaluate(f, z, allow_outside=True)
    p0 = _p_from_values(th, ph, 0.0, z, fv, f1)
    p1 = _p_from_values(th, ph, 1.0, z, fv, f1)
    pd = _p_from_values(th, ph, 1 - t, z, fv, f1)
    return p0, p1, pd


def _richardson(values, ratio=10.0):
    # values ordered from largest to smallest distance; error ~ c1 d + c2 d^2
    a, b, c = values
    r1 = (ratio * b - a) / (ratio - 1)
    r2 = (ratio * c - b) / (ratio - 1)
    return (ratio**2 * r2 - r1) / (ratio**2 - 1)


def removable_limit(pair, f, t, z):
    """Limit of ``P_0 P_1 / P_{1-t}`` as ζ → z, extrapolated along four rays.

    Raises :class:`NonRemovableSingularity` when the ray estimates disagree
    by more than ``LIMIT_RAY_TOL`` relative, or blow up.
    """
    z = complex(z)
    d = np.asarray(LIMIT_DISTANCES)
    # rays rotated off the axes so the point stays generic
    dirs = np.exp(1j * (np.pi / 8 + np.pi / 2 * np.arange(4)))
    zeta = z + d[None, :] * dirs[:, None]
    with np.errstate(all="ignore"):
        p0, p1, pd = _ratio_parts(pair, f, t, zeta)
        vals = p0 * p1 / pd
    if not np.all(np.isfinite(vals)):
        raise NonRemovableSingularity(f"ratio diverges near z={z}", z)
    est = np.array([_richardson(v) for v in vals])
    spread = np.max(np.abs(est - est.mean()))
    scale = max(np.max(np.abs(est)), 1.0)
    if spread > LIMIT_RAY_TOL * scale:
        raise NonRemovableSingularity(
            f"ray limits disagree near z={z} (spread {spread:.3g})", z)
    return complex(est.mean())


def h_operator(pair: ThetaPhiPair, f: fncat.AnalyticMap, t, z, *, eps=EPS_DEN):
    """Harmonic-mean operator ``P_0 P_1 / P_{1-t}``.

    Entries where ``|P_{1-t}| < eps (|P_0| + |P_1|)`` are replaced by the
    numerically extrapolated limit; such scalar results come back as
    :class:`NearSingular`.  ``f ≡ 0`` gives 0.
    """
    _check_weight(t)
    scalar = np.ndim(z) == 0
    if f.is_zero:
        return 0j if scalar else np.zeros(np.shape(z), dtype=complex)
    if t == 0:
        out = fncat.evaluate(f, z)[0]
        return out
    za = np.asarray(z, dtype=complex)
    fncat.evaluate(f, za)  # raise on invalid points before dividing
    p0, p1, pd = _ratio_parts(pair, f, t, za)
    small = (np.abs(pd) < eps * (np.abs(p0) + np.abs(p1))) | (pd == 0)
    with np.errstate(all="ignore"):
        out = np.where(small, 0, p0 * p1 / np.where(small, 1, pd))
    if small.any():
        flat = out.reshape(-1)
        zf = za.reshape(-1)
        for i in np.flatnonzero(small):
            flat[i] = removable_limit(pair, f, t, zf[i])
        out = flat.reshape(za.shape)
    if scalar:
        val = complex(out)
        return NearSingular(val) if bool(small) else val
    return out


def h_operator_masked(pair, p_values, theta_values, phi_values, z, t, eps=EPS_DEN):
    """Vectorised operator from precomputed ``(p, p')`` values.

    Returns ``(H, singular)`` where ``singular`` flags grid points whose
    denominator is below the removable-singularity threshold; the caller
    decides how to resolve them (see :func:`removable_limit`).
    """
    pv, p1 = p_values
    p0 = pv
    q1 = theta_values * pv + phi_values * z * p1
    pd = t * p0 + (1 - t) * q1
    small = (np.abs(pd) < eps * (np.abs(p0) + np.abs(q1))) | (pd == 0)
    with np.errstate(all="ignore"):
        out = p0 * q1 / np.where(small, 1, pd)
    return np.where(small, np.nan, out), small
