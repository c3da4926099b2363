"""Janowski-to-Janowski harmonic-mean implication: coefficients, hypotheses,
boundary ratio and the final bound.

Everything polynomial is evaluated in exact rationals when the inputs are
rational (``fractions.Fraction``); only the boundary ratio uses floats.

Quad (A, B, D, E) means: target p ≺ (1+Az)/(1+Bz), hypothesis on the
harmonic-mean expression ≺ (1+Dz)/(1+Ez).  At a boundary contact with
ω = e^{iθ}, zω' = kω the ratio |(P-1)/(D-EP)| reduces to

    (A-B) |L + M u + N u²| / |G + H u + I u² + J u³|,  u = e^{iθ}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from numbers import Rational

import numpy as np

from .errors import ParameterError, PoleError

I_FORMS = ("derived", "printed")
DEFAULT_K_RANGE = tuple(range(1, 101))
VALIDATED_TUPLE = ("3/8", "0", "1", "123/128")


def as_number(x):
    """Fractions for rationals and rational strings, floats otherwise."""
    if isinstance(x, (Rational, str)):
        return Fraction(x)
    return float(x)


def fmt(x):
    """JSON-friendly value: 'p/q' strings for Fractions."""
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


@dataclass(frozen=True)
class JanowskiQuad:
    A: object
    B: object
    D: object
    E: object

    def __post_init__(self):
        for name in "ABDE":
            object.__setattr__(self, name, as_number(getattr(self, name)))
        if not -1 <= self.B < self.A <= 1:
            raise ParameterError(f"need -1 <= B < A <= 1, got A={self.A}, B={self.B}")
        if not -1 <= self.E < self.D <= 1:
            raise ParameterError(f"need -1 <= E < D <= 1, got D={self.D}, E={self.E}")

    @property
    def exact(self):
        return all(isinstance(getattr(self, n), Fraction) for n in "ABDE")

    def as_float(self):
        return JanowskiQuad(*(float(getattr(self, n)) for n in "ABDE"))

    def to_json(self):
        return {n: fmt(getattr(self, n)) for n in "ABDE"}

    @classmethod
    def validated(cls):
        return cls(*VALIDATED_TUPLE)


@dataclass(frozen=True)
class SpiralCoeffs:
    L: object
    M: object
    N: object
    G: object
    H: object
    I: object
    J: object
    k: object
    i_form: str = "derived"

    def to_json(self):
        return {n: fmt(getattr(self, n)) for n in "LMNGHIJk"} | {"i_form": self.i_form}


def spiral_coeffs(quad: JanowskiQuad, k, i_form: str = "derived") -> SpiralCoeffs:
    """The seven constants at contact order k >= 1.

    ``i_form="derived"`` uses the u² coefficient obtained by expanding the
    contact denominator, whose leading A²E term carries (k+1); ``"printed"``
    uses (k+2) in that term instead.
    """
    if i_form not in I_FORMS:
        raise ValueError(f"i_form must be one of {I_FORMS}")
    k = as_number(k) if quad.exact else float(k)
    if k < 1:
        raise ParameterError("k must be >= 1")
    A, B, D, E = quad.A, quad.B, quad.D, quad.E
    L = k + 2
    M = 2 * (A + B) + k * (2 * A - B)
    N = 2 * A * B
    G = 2 * (E - D)
    H = 2 * A * E * (k + 2) - 2 * B * E * (k - 1) - A * D * (k + 2) + B * D * (k - 4)
    a2e = k + 1 if i_form == "derived" else k + 2
    I = 2 * A * A * E * a2e - 2 * A * B * E * (k - 2) - A * B * D * (k + 4) + B * B * D * (k - 2)
    J = 2 * A * A * B * E - 2 * A * B * B * D
    return SpiralCoeffs(L, M, N, G, H, I, J, k, i_form)


def min_quad(a, b, c):
    """min of a t² + b t + c over t in [-1, 1], by the two-branch formula."""
    if a > 0 and abs(b) < 2 * a:
        return (4 * a * c - b * b) / (4 * a)
    return a - abs(b) + c


# --------------------------------------------------------------------------
# hypotheses


def cond3_margin(quad):
    return 2 * quad.E * (1 + quad.A) - quad.D * (1 + quad.B)


def cond4_sides(quad):
    A, B, D, E = quad.A, quad.B, quad.D, quad.E
    lhs = 3 + 2 * A * B + D * (B + 1) * (A * (2 * B + 3) + B + 2)
    rhs = 2 * E * (A + 1) * (A * (B + 2) + 1) + abs(4 * A + B)
    return lhs, rhs


def cond2_sides(c: SpiralCoeffs):
    """Literal reading: GH + HI - 3GJ + IJ + 12GJ  vs  4|GI + HJ|."""
    G, H, I, J = c.G, c.H, c.I, c.J
    lhs = G * H + H * I - 3 * G * J + I * J + 12 * G * J
    return lhs, 4 * abs(G * I + H * J)


def _poly_in_k(quad, fn, i_form, degree):
    """Coefficients (ascending) of a polynomial in k recovered by exact interpolation."""
    ks = list(range(1, degree + 2))
    vals = [fn(spiral_coeffs(quad, kk, i_form)) for kk in ks]
    if quad.exact:
        V = [[Fraction(kk) ** j for j in range(degree + 1)] for kk in ks]
        return _solve_exact(V, vals)
    return list(np.linalg.solve(np.vander(ks, degree + 1, increasing=True), vals))


def _solve_exact(V, y):
    n = len(y)
    M = [row[:] + [y[i]] for i, row in enumerate(V)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _sign(x):
    return (x > 0) - (x < 0)


def cond2_asymptote(quad, i_form="derived"):
    """Sign of cond2's margin as k → ∞ from the leading coefficients.

    lhs is quadratic in k and GI + HJ linear, so for large k the margin is a
    polynomial with a fixed sign pattern.
    """
    G_lhs = lambda c: cond2_sides(c)[0]
    inner = lambda c: c.G * c.I + c.H * c.J
    lhs = _poly_in_k(quad, G_lhs, i_form, 2)
    lin = _poly_in_k(quad, inner, i_form, 1)
    s = _sign(lin[1]) or _sign(lin[0])
    margin = [lhs[0] - 4 * s * lin[0], lhs[1] - 4 * s * lin[1], lhs[2]]
    lead = next((m for m in reversed(margin) if m != 0), 0)
    return {"lhs_coeffs": [fmt(x) for x in lhs], "inner_coeffs": [fmt(x) for x in lin],
            "margin_coeffs": [fmt(x) for x in margin], "leading_sign": _sign(lead)}


@dataclass
class ConditionReport:
    quad: JanowskiQuad
    i_form: str
    cond3: bool
    cond3_margin: object
    cond4: bool
    cond4_lhs: object
    cond4_rhs: object
    cond2_per_k: list = field(default_factory=list)
    asymptote: dict = field(default_factory=dict)
    note: str = ("condition (2) is evaluated literally as GH + HI - 3GJ + IJ + 12GJ; "
                 "it equals the simplified GH + HI + 9GJ + IJ exactly")

    @property
    def cond2(self):
        return all(row["holds"] for row in self.cond2_per_k)

    @property
    def all_hold(self):
        return self.cond3 and self.cond4 and self.cond2

    @property
    def cond4_margin(self):
        return self.cond4_lhs - self.cond4_rhs

    def to_json(self):
        return {"quad": self.quad.to_json(), "i_form": self.i_form, "exact": self.quad.exact,
                "cond3": {"holds": self.cond3, "margin": fmt(self.cond3_margin)},
                "cond4": {"holds": self.cond4, "lhs": fmt(self.cond4_lhs),
                          "rhs": fmt(self.cond4_rhs), "margin": fmt(self.cond4_margin)},
                "cond2": {"holds": self.cond2,
                          "k_coverage": [fmt(r["k"]) for r in self.cond2_per_k[:1]]
                          + [fmt(r["k"]) for r in self.cond2_per_k[-1:]],
                          "failing_k": [fmt(r["k"]) for r in self.cond2_per_k if not r["holds"]],
                          "asymptote": self.asymptote},
                "note": self.note}


def check_conditions(quad: JanowskiQuad, k_range=DEFAULT_K_RANGE,
                     i_form: str = "derived") -> ConditionReport:
    m3 = cond3_margin(quad)
    lhs4, rhs4 = cond4_sides(quad)
    rows = []
    for k in k_range:
        c = spiral_coeffs(quad, k, i_form)
        lhs, rhs = cond2_sides(c)
        simplified = c.G * c.H + c.H * c.I + 9 * c.G * c.J + c.I * c.J
        if quad.exact:
            assert simplified == lhs
        rows.append({"k": c.k, "lhs": lhs, "rhs": rhs, "holds": lhs >= rhs})
    return ConditionReport(quad, i_form, m3 > 0, m3, lhs4 >= rhs4, lhs4, rhs4, rows,
                           cond2_asymptote(quad, i_form))


# --------------------------------------------------------------------------
# boundary ratio


def quad_modulus_sq(L, M, N, cos_t):
    """|L + M u + N u²|² as a polynomial in cos θ."""
    return L * L + M * M + N * N - 2 * L * N + 2 * (L + N) * M * cos_t + 4 * L * N * cos_t**2


def cubic_modulus_sq(G, H, I, J, cos_t):
    """|G + H u + I u² + J u³|² as a polynomial in cos θ."""
    return (G * G + H * H + I * I + J * J - 2 * G * I - 2 * H * J
            + (2 * G * H + 2 * H * I - 6 * G * J + 2 * I * J) * cos_t
            + (4 * G * I + 4 * H * J) * cos_t**2 + 8 * G * J * cos_t**3)


def cubic_derivative_min(c: SpiralCoeffs, n=2001):
    """Minimum over a t-grid of d/dt of the cubic modulus polynomial."""
    G, H, I, J = (float(x) for x in (c.G, c.H, c.I, c.J))
    t = np.linspace(-1, 1, n)
    d = (2 * G * H + 2 * H * I - 6 * G * J + 2 * I * J) + 2 * (4 * G * I + 4 * H * J) * t \
        + 3 * 8 * G * J * t**2
    return float(d.min())


def boundary_ratio(quad: JanowskiQuad, k, theta, i_form: str = "derived"):
    """(A - B) |L + M u + N u²| / |G + H u + I u² + J u³| through the cos-expansions."""
    q = quad.as_float()
    c = spiral_coeffs(q, k, i_form)
    ct = np.cos(theta)
    den = cubic_modulus_sq(c.G, c.H, c.I, c.J, ct)
    if np.any(den <= 1e-28):
        raise PoleError(f"denominator vanishes at k={k}, θ={theta}")
    return (q.A - q.B) * np.sqrt(quad_modulus_sq(c.L, c.M, c.N, ct) / den)


def omega_ratio(quad: JanowskiQuad, k, theta):
    """Independent assembly: |(P-1)/(D-EP)| with ω = e^{iθ}, zω' = kω."""
    q = quad.as_float()
    A, B, D, E = q.A, q.B, q.D, q.E
    w = np.exp(1j * np.asarray(theta, dtype=float))
    zw1 = k * w
    p = (1 + A * w) / (1 + B * w)
    zp1 = (A - B) * zw1 / (1 + B * w) ** 2
    P = 2 * p * (p + zp1) / (2 * p + zp1)
    return np.abs((P - 1) / (D - E * P))


# --------------------------------------------------------------------------
# final bound and ψ(k)


@dataclass
class FinalBound:
    numerator: object
    denominator: object
    applicable: bool

    @property
    def value(self):
        return self.numerator / self.denominator if self.applicable else None

    @property
    def margin(self):
        return self.value - 1 if self.applicable else None

    @property
    def holds(self):
        return self.applicable and self.value >= 1

    def to_json(self):
        if not self.applicable:
            return {"applicable": False, "reason": "bound inapplicable: nonpositive denominator",
                    "numerator": fmt(self.numerator), "denominator": fmt(self.denominator)}
        return {"applicable": True, "numerator": fmt(self.numerator),
                "denominator": fmt(self.denominator), "value": fmt(self.value),
                "value_float": float(self.value), "margin": fmt(self.margin),
                "margin_float": float(self.margin), "holds": self.holds}


def final_bound(quad: JanowskiQuad) -> FinalBound:
    A, B, D, E = quad.A, quad.B, quad.D, quad.E
    num = 3 + 2 * A * B - abs(4 * A + B)
    den = 2 * E * (A + 1) * (A * (B + 2) + 1) - D * (B + 1) * (A * (2 * B + 3) + B + 2)
    return FinalBound(num, den, den > 0)


def psi_k(quad, k, i_form="derived"):
    c = spiral_coeffs(quad, k, i_form)
    return ((c.L - abs(c.M) + c.N) / (c.G + c.H + c.I + c.J)) ** 2


def psi_k_monotone(quad: JanowskiQuad, k_grid=None, i_form="derived", tol=1e-12):
    """Check that ψ(k) = ((L-|M|+N)/(G+H+I+J))² is nondecreasing on k_grid."""
    if cond3_margin(quad) <= 0:
        raise ParameterError("ψ(k) monotonicity requires 2E(1+A) - D(1+B) > 0")
    if k_grid is None:
        k_grid = [Fraction(10 + j, 10) for j in range(991)] if quad.exact else \
            list(np.round(np.arange(1, 100.05, 0.1), 10))
    vals = [psi_k(quad, k, i_form) for k in k_grid]
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    worst = min(diffs) if diffs else 0
    psi1 = psi_k(quad, 1, i_form)
    fb = final_bound(quad)
    return {"nondecreasing": worst >= -tol, "worst_step": fmt(worst),
            "min_over_psi1": all(v >= psi1 - tol for v in vals),
            "psi1": fmt(psi1),
            "psi1_equals_final_bound_sq": fb.applicable and psi1 == fb.value ** 2
            if quad.exact else fb.applicable and math.isclose(psi1, fb.value ** 2, rel_tol=1e-12),
            "points": len(vals)}


# --------------------------------------------------------------------------
# feasibility scan


def rational_range(lo, hi, step):
    lo, hi, step = Fraction(lo), Fraction(hi), Fraction(step)
    n = int((hi - lo) / step)
    return [lo + j * step for j in range(n + 1)]


DEFAULT_GRID = {
    "A": rational_range(-1, 1, "1/8"),     # 17
    "B": rational_range(-1, 1, "1/4"),     # 9
    "D": rational_range(0, 1, "1/4"),      # 5
    "E": rational_range(-1, 1, "1/16"),    # 33
}


def feasible(quad, k_range=DEFAULT_K_RANGE, i_form="derived"):
    """All three hypotheses plus final bound >= 1 (cheap tests first)."""
    if cond3_margin(quad) <= 0:
        return False
    lhs4, rhs4 = cond4_sides(quad)
    if lhs4 < rhs4 or not final_bound(quad).holds:
        return False
    for k in k_range:
        lhs, rhs = cond2_sides(spiral_coeffs(quad, k, i_form))
        if lhs < rhs:
            return False
    return True


def feasibility_scan(grid=None, k_range=DEFAULT_K_RANGE, i_form="derived"):
    """Feasible tuples of the grid, sorted; tuples violating the type invariants are skipped."""
    grid = grid or DEFAULT_GRID
    out = []
    total = 0
    for A, B, D, E in product(grid["A"], grid["B"], grid["D"], grid["E"]):
        if not (-1 <= B < A <= 1 and -1 <= E < D <= 1):
            continue
        total += 1
        q = JanowskiQuad(A, B, D, E)
        if feasible(q, k_range, i_form):
            out.append(q)
    out.sort(key=lambda q: (q.A, q.B, q.D, q.E))
    return {"valid_tuples": total, "feasible": out}


def contact_ratio_min(quad: JanowskiQuad, k_values=(1, 2, 5, 10, 100), n_theta=4096,
                      i_form="derived"):
    """Smallest boundary ratio over a (k, θ) grid.

    The contradiction at a boundary contact needs this to be >= 1; the
    closed-form final bound is only a proxy for it.
    """
    theta = -np.pi + 2 * np.pi * np.arange(n_theta + 1) / n_theta
    best = None
    for k in k_values:
        r = boundary_ratio(quad, k, theta, i_form)
        j = int(np.argmin(r))
        if best is None or r[j] < best["ratio"]:
            best = {"ratio": float(r[j]), "k": float(k), "theta": float(theta[j])}
    best["at_least_one"] = best["ratio"] >= 1
    return best
