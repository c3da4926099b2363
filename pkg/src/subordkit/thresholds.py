"""Re p > α thresholds for the harmonic/geometric combination operators.

At a boundary contact p(z0) = α + ix, z0 p'(z0) = my with

    my <= -((1 - α)² + x²) / (2(1 - α))

the combination operators reduce to E(0) (pure quotient) and E(1) (geometric
end of the μ-spiral).  β0 / β1 are the piecewise upper bounds keyed on the
case flags I1..I4; ``regional_oracle`` sweeps (x, my) by brute force and
reports how far Re E exceeds the selected bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateParameters, ParameterError

ORACLE_TOL = 1e-9
DEFAULT_NX = 400
DEFAULT_NMY = 400
X_RANGE = (1e-3, 10.0)
MY_FLOOR = -50.0

# (α, ρ) design covering the flag cells; the first five sit in I1
DESIGN = (
    (0.0, 0.5), (0.1, 0.2), (0.25, 0.5), (0.3, 0.6), (0.4, 0.8),
    (0.55, 0.2), (0.6, 0.9), (0.75, 0.0), (0.75, 0.3), (0.8, 0.9),
    (0.9, 0.1), (0.99, 0.5),
)


@dataclass(frozen=True)
class ThresholdParams:
    alpha: float
    rho: float
    gamma: float = 0.0
    mu: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        a, r = self.alpha, self.rho
        if not 0 <= a < 1:
            raise ParameterError("α must lie in [0, 1)")
        for name, lo, hi in (("rho", 0, 1), ("gamma", 0, 1), ("mu", 0, 1), ("delta", 1, 2)):
            v = getattr(self, name)
            if not lo <= v <= hi:
                raise ParameterError(f"{name}={v} outside [{lo}, {hi}]")
        if a <= 0.5 and r < a * (1 + 2 * a):
            raise ParameterError(f"need ρ >= α(1+2α) = {a * (1 + 2 * a)} when α <= 1/2")


def my_bound(alpha, x):
    """Largest admissible my at height x."""
    return -((1 - alpha) ** 2 + x * x) / (2 * (1 - alpha))


@dataclass(frozen=True)
class BoundaryPoint:
    x: float
    my: float

    def check(self, alpha):
        if not self.x > 0:
            raise ParameterError("x must be positive")
        if self.my > my_bound(alpha, self.x):
            raise ParameterError(f"my={self.my} above the contact bound {my_bound(alpha, self.x)}")


@dataclass(frozen=True)
class CaseFlags:
    I1: bool
    I2: bool
    I3: bool
    I4: bool
    ties: frozenset = field(default_factory=frozenset)

    @property
    def label(self):
        return ",".join(("" if getattr(self, n) else "~") + n for n in ("I1", "I2", "I3", "I4"))


def i3_threshold(alpha, rho):
    return (2 * alpha**2 - rho * (1 - alpha)) * (1 - alpha) / (2 * (1 - alpha) + rho)


def case_flags(alpha, rho, pt: BoundaryPoint, strict=False) -> CaseFlags:
    """Flags are plain arithmetic; ``strict`` also enforces the contact bound on pt."""
    if strict:
        pt.check(alpha)
    x2, my = pt.x * pt.x, pt.my
    i2 = alpha**2 - x2 + rho * my
    i3 = x2 - i3_threshold(alpha, rho)
    i4 = alpha**2 + x2 + rho * my
    ties = frozenset(n for n, v in (("I2", i2), ("I3", i3), ("I4", i4)) if v == 0)
    return CaseFlags(0 <= alpha <= 0.5, i2 > 0, i3 >= 0, i4 <= 0, ties)


def _div(num, den, what):
    if den == 0:
        raise DegenerateParameters(f"{what}: zero denominator")
    return num / den


def _beta0_branch(a, r, I1, I2, I3):
    if I1:
        return _div(a * (1 + a) * (1 - 2 * a), r * (1 - a) - 2 * a * a, "β0 branch I1"), "I1"
    if I2:
        return a, "~I1,I2"
    if I3:
        return a + _div(r * (1 - r) * (1 - a) * (2 * (1 - a) + r),
                        16 * a * (2 * a * a - r * (1 - a)), "β0 branch ~I2,I3"), "~I1,~I2,I3"
    return a + r * (1 - r) / (16 * a * (1 - a)) * _div(
        2 * a * a - r * (1 - a), 2 * (1 - a) + r, "β0 branch ~I3"), "~I1,~I2,~I3"


def _beta1_branch(a, r, I1, I2, I3, I4):
    if I4:
        return a, "I4"
    if I1:
        return a + _div(2 * a * r * r * (1 - 2 * a),
                        (r - 2 * (1 - a)) ** 2 * (r * (1 - a) - 2 * a * a),
                        "β1 branch I1"), "I1,~I4"
    if I2:
        return a + _div(a * r * (1 - a) * (4 * a * a - r * (1 - a)),
                        4 * (2 * a * a - r * (1 - a)) ** 2, "β1 branch I2"), "~I1,I2,~I4"
    den = 2 * (4 * a * a * (1 - a) + r * (2 * a - 1))
    if I3:
        return a + _div(a * r * (1 - a) * (2 * (1 - a) + r), den, "β1 branch I3"), "~I1,~I2,I3,~I4"
    return a + _div(a * r * (2 * a * a - r * (1 - a)), den, "β1 branch ~I3"), "~I1,~I2,~I3,~I4"


def _with_ties(fn, flags: CaseFlags, names):
    """Evaluate the branch; on a tied flag also its neighbour, keeping the max."""
    base = {n: getattr(flags, n) for n in names}
    variants = [base]
    for t in flags.ties & set(names):
        variants += [v | {t: not v[t]} for v in variants]
    results = [fn(**v) for v in variants]
    return max(results, key=lambda r: r[0])


def beta0(alpha, rho, flags: CaseFlags, detail=False):
    val, label = _with_ties(lambda **f: _beta0_branch(alpha, rho, **f), flags, ("I1", "I2", "I3"))
    return (val, label) if detail else val


def beta1(alpha, rho, flags: CaseFlags, detail=False):
    val, label = _with_ties(lambda **f: _beta1_branch(alpha, rho, **f), flags,
                            ("I1", "I2", "I3", "I4"))
    return (val, label) if detail else val


def _den(alpha, x, rmy):
    return (alpha**2 - x * x + rmy) ** 2 + 4 * alpha**2 * x * x


def re_E0(alpha, rho, x, my):
    """Re of the quotient operator at the contact point."""
    return alpha + (1 - rho) * my * alpha * (alpha**2 + x * x + rho * my) / _den(alpha, x, rho * my)


def re_E1(alpha, rho, x, my):
    """Re of the geometric end E(1) = q / (1 + ρ my / q²) at the contact point."""
    return alpha - alpha * rho * my * (alpha**2 + x * x + rho * my) / _den(alpha, x, rho * my)


def re_E_direct(alpha, rho, x, my, mu):
    """Independent complex evaluation of Re E(μ) (principal branch)."""
    q = complex(alpha, x)
    w = my / q**2
    return (q * (1 + w) ** (1 - mu) / (1 + rho * w)).real


# --------------------------------------------------------------------------
# regional oracle


def region_grid(alpha, nx=DEFAULT_NX, nmy=DEFAULT_NMY, x_range=X_RANGE, my_floor=MY_FLOOR):
    """x log-spaced on (x_lo, x_hi]; my linear from the contact bound down to
    ``my_floor`` (or 50 below the bound where the bound is already lower)."""
    lo, hi = x_range
    x = np.logspace(math.log10(lo), math.log10(hi), nx + 1)[1:]
    b = my_bound(alpha, x)
    end = np.minimum(my_floor, b + my_floor)
    s = np.linspace(0, 1, nmy)
    my = b[:, None] + (end - b)[:, None] * s[None, :]
    return np.broadcast_to(x[:, None], my.shape), my


def _vector_flags(alpha, rho, X, MY):
    x2 = X * X
    i2 = alpha**2 - x2 + rho * MY
    i3 = x2 - i3_threshold(alpha, rho)
    i4 = alpha**2 + x2 + rho * MY
    return i2, i3, i4


@dataclass
class OracleReport:
    alpha: float
    rho: float
    which: str
    worst_margin: float
    worst_at: dict
    cells: dict
    points: int
    ties: int

    @property
    def passed(self):
        return self.worst_margin <= ORACLE_TOL

    def to_json(self):
        return {"alpha": self.alpha, "rho": self.rho, "which": self.which,
                "worst_margin": self.worst_margin, "passed": self.passed,
                "worst_at": self.worst_at, "cells": self.cells, "points": self.points,
                "tied_points": self.ties}


def regional_oracle(alpha, rho, which="E0", nx=DEFAULT_NX, nmy=DEFAULT_NMY) -> OracleReport:
    """Brute-force max of Re E - β over the contact region, per flag cell."""
    ThresholdParams(alpha, rho)
    if which not in ("E0", "E1"):
        raise ValueError("which must be 'E0' or 'E1'")
    X, MY = region_grid(alpha, nx, nmy)
    i2, i3, i4 = _vector_flags(alpha, rho, X, MY)
    I1 = 0 <= alpha <= 0.5
    val = (re_E0 if which == "E0" else re_E1)(alpha, rho, X, MY)
    beta = np.full(X.shape, np.nan)
    label = np.empty(X.shape, dtype=object)
    patterns = {}
    flags_arr = (i2 > 0, i3 >= 0, i4 <= 0)
    tie_mask = (i2 == 0) | (i3 == 0) | (i4 == 0)
    # branch values depend only on the flag pattern: evaluate per distinct pattern
    keys = np.stack(flags_arr, axis=-1).reshape(-1, 3)
    for key in np.unique(keys, axis=0):
        I2, I3, I4 = (bool(k) for k in key)
        f = CaseFlags(I1, I2, I3, I4)
        b, lab = beta0(alpha, rho, f, True) if which == "E0" else beta1(alpha, rho, f, True)
        sel = np.all(np.stack(flags_arr, axis=-1) == key, axis=-1)
        beta[sel] = b
        label[sel] = lab
        patterns[lab] = b
    if tie_mask.any():
        for i, j in np.argwhere(tie_mask):
            f = case_flags(alpha, rho, BoundaryPoint(float(X[i, j]), float(MY[i, j])))
            beta[i, j], label[i, j] = (beta0 if which == "E0" else beta1)(alpha, rho, f, True)
    margin = val - beta
    k = np.unravel_index(np.argmax(margin), margin.shape)
    cells = {}
    for lab in sorted(set(label.ravel())):
        sel = label == lab
        m = margin[sel]
        j = np.argmax(m)
        cells[lab] = {"beta": float(beta[sel][0]), "worst_margin": float(m[j]),
                      "points": int(sel.sum()),
                      "at": {"x": float(X[sel][j]), "my": float(MY[sel][j])}}
    return OracleReport(alpha, rho, which, float(margin[k]),
                        {"x": float(X[k]), "my": float(MY[k]), "cell": label[k]},
                        cells, int(margin.size), int(tie_mask.sum()))


# --------------------------------------------------------------------------
# spiral and combination


def spiral_re_check(alpha, delta_grid=None, x_grid=None, tol=ORACLE_TOL):
    """Worst Re((α + ix)^δ) - α over the grids."""
    deltas = np.linspace(1, 2, 101) if delta_grid is None else np.asarray(delta_grid, float)
    xs = np.logspace(-3, 2, 2001) if x_grid is None else np.asarray(x_grid, float)
    w = (alpha + 1j * xs)[None, :] ** deltas[:, None]
    margin = w.real - alpha
    i, j = np.unravel_index(np.argmax(margin), margin.shape)
    worst = float(margin[i, j])
    return {"alpha": alpha, "worst_margin": worst, "holds": worst <= tol,
            "at": {"delta": float(deltas[i]), "x": float(xs[j])}}


def combined_threshold(params: ThresholdParams, which: str, pt: BoundaryPoint):
    """γα + (1-γ) β_i with β_i from the flags at pt."""
    if which not in ("thm29", "29", "thm210", "210"):
        raise ValueError("which must be 'thm29' or 'thm210'")
    if params.gamma == 1:
        return params.alpha
    flags = case_flags(params.alpha, params.rho, pt)
    if which in ("thm29", "29"):
        b = beta0(params.alpha, params.rho, flags)
    elif which in ("thm210", "210"):
        b = beta1(params.alpha, params.rho, flags)
    else:
        raise ValueError("which must be 'thm29' or 'thm210'")
    return params.gamma * params.alpha + (1 - params.gamma) * b


def threshold_sup(params: ThresholdParams, which: str):
    """γα + (1-γ) max_cells β_i: the contact-independent reading of the threshold.

    The flags depend on the unknown contact (x, my); taking the largest branch
    that can occur for the given α makes β a hypothesis-level constant.
    """
    a, r = params.alpha, params.rho
    if which not in ("thm29", "29", "thm210", "210"):
        raise ValueError("which must be 'thm29' or 'thm210'")
    if params.gamma == 1:
        return a
    I1 = 0 <= a <= 0.5
    if which in ("thm29", "29"):
        cells = [(I1, i2, i3) for i2 in (True, False) for i3 in (True, False)]
        vals = [_beta0_branch(a, r, *c)[0] for c in (cells[:1] if I1 else cells)]
    elif which in ("thm210", "210"):
        cells = [(I1, i2, i3, i4) for i2 in (True, False) for i3 in (True, False)
                 for i4 in (True, False)]
        if I1:
            cells = [(True, True, True, True), (True, True, True, False)]
        vals = [_beta1_branch(a, r, *c)[0] for c in cells]
    else:
        raise ValueError("which must be 'thm29' or 'thm210'")
    return params.gamma * a + (1 - params.gamma) * max(vals)
