"""Harmonic-mean admissibility functional and its boundary closed forms.

For ψ(a, b) = 2a(a + b)/(2a + b) and a target q, the admissibility data are
r = q(ζ) on the boundary and s = m ζ q'(ζ), m ≥ 1.  Three targets are
covered: e^z, √(1+z) (lemniscate boundary) and 2/(1 + e^{-z}).  For each we
provide the closed form of Re ψ(r, s) and a direct-evaluation oracle.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import domains
from .errors import PoleError

CASES = ("exp", "sqrt", "sigmoid")
DEFAULT_OMEGAS = {
    "exp": ("sqrt", "sigmoid", "crescent", "sine", "cardioid"),
    "sqrt": ("sigmoid",),
    "sigmoid": ("sqrt",),
}
POLE_RADIUS = 0.05
DEFAULT_THETA_N = 1024


def psi_harmonic(a, b):
    """``2a(a + b) / (2a + b)``."""
    den = 2 * a + b
    if np.any(den == 0):
        raise PoleError("2a + b = 0")
    return 2 * a * (a + b) / den


def theta_interval(case_id):
    if case_id == "sqrt":
        return -math.pi / 4, math.pi / 4
    if case_id in ("exp", "sigmoid"):
        return -math.pi, math.pi
    raise ValueError(f"unknown case {case_id!r}")


def default_theta_grid(case_id, n=DEFAULT_THETA_N):
    lo, hi = theta_interval(case_id)
    if case_id == "sqrt":
        # r vanishes at the endpoints, s blows up: use cell midpoints
        return lo + (np.arange(n) + 0.5) * (hi - lo) / n
    return np.linspace(lo, hi, n)


def default_m_grid(m_max=20.0, step=0.25, with_infinity=True):
    m = list(np.arange(1.0, m_max + step / 2, step))
    return np.array(m + ([math.inf] if with_infinity else []))


def boundary_data(case_id, theta, m):
    """(r, s) on the target boundary; m = inf returns s = inf."""
    theta = np.asarray(theta, dtype=float)
    u = np.exp(1j * theta)
    if case_id == "exp":
        r = np.exp(u)
        ds = r * u
    elif case_id == "sqrt":
        r = np.sqrt(2 * np.cos(2 * theta)) * u
        with np.errstate(divide="ignore", invalid="ignore"):
            ds = u**2 / (2 * r)
    elif case_id == "sigmoid":
        e = np.exp(-u)
        r = 2 / (1 + e)
        ds = r * u * e / (1 + e)
    else:
        raise ValueError(f"unknown case {case_id!r}")
    return r, m * ds


def psi_direct(case_id, theta, m):
    """ψ(r, s) computed from the boundary data; m = inf gives the limit 2r."""
    r, s = boundary_data(case_id, theta, 1.0)
    if np.isinf(m):
        return 2 * r
    return psi_harmonic(r, m * s)


def example_g(case_id, theta, m):
    """Closed form of Re ψ(r(θ), s(θ, m)); vectorised over θ, m = inf allowed."""
    th = np.asarray(theta, dtype=float)
    c, sn = np.cos(th), np.sin(th)
    inf = np.isinf(m)
    if case_id == "exp":
        ec = np.exp(c)
        if inf:
            out = 2 * ec * np.cos(sn)
        else:
            den = m * m + 4 * m * c + 4
            if np.any(den == 0):
                raise PoleError(f"2 + m e^(iθ) = 0 at m={m}")
            out = 2 * ec * ((m * m + 3 * m * c + 2) * np.cos(sn) - m * sn * np.sin(sn)) / den
    elif case_id == "sqrt":
        c2 = np.cos(2 * th)
        lo, hi = theta_interval("sqrt")
        if np.any((th < lo) | (th > hi)):
            raise ValueError("θ outside [-π/4, π/4]")
        root = 2 * np.sqrt(2 * c2) * c
        out = root if inf else root * (m + 4 * c2) / (m + 8 * c2)
    elif case_id == "sigmoid":
        ec, e2, e3 = np.exp(c), np.exp(2 * c), np.exp(3 * c)
        cs = np.cos(sn)
        front = 1 + e2 + 2 * ec * cs
        if inf:
            out = 4 * ec * (ec + cs) / front
        else:
            N = (m * m * ec + m * m * cs + 5 * m * ec * c
                 + 3 * m * e2 * np.cos(th - sn) + m * np.cos(th - sn)
                 + 2 * m * np.cos(th + sn) + m * ec * np.cos(th - 2 * sn)
                 + 4 * ec + 2 * e3 + 6 * e2 * cs + 2 * cs + 2 * ec * np.cos(2 * sn))
            D = front * (4 + m * m + 4 * e2 + 4 * m * c + 8 * ec * cs
                         + 4 * m * ec * np.cos(th - sn))
            # the numerator/denominator pair as usually printed omits the
            # common factor 4e^{cos θ}; without it g(0) would not match
            out = 4 * ec * N / D
    else:
        raise ValueError(f"unknown case {case_id!r}")
    return float(out) if np.ndim(out) == 0 else out


def example_g0_printed(case_id, m):
    """g(0) in the form printed alongside the examples (exp form valid at m = 1 only)."""
    e = math.e
    if case_id == "exp":
        return 2 * e * (m * m + 3 * m + 2) / (5 + 4 * m)
    if case_id == "sqrt":
        return 2 * math.sqrt(2) * (m + 4) / (m + 8)
    if case_id == "sigmoid":
        return 4 * e * (1 + e + m) / ((1 + e) * (2 + 2 * e + m))
    raise ValueError(case_id)


def excluded_mask(case_id, theta, m):
    """(θ, m) samples inside the declared pole-exclusion disk."""
    theta = np.asarray(theta, dtype=float)
    if case_id != "exp" or np.isinf(m):
        return np.zeros(theta.shape, dtype=bool)
    return np.minimum(np.hypot(theta - math.pi, m - 2),
                      np.hypot(theta + math.pi, m - 2)) < POLE_RADIUS


def g_consistency(case_id, theta_grid=None, m_grid=None):
    """Max |closed form - Re ψ(direct)| over the grid (pole disk skipped)."""
    theta = default_theta_grid(case_id) if theta_grid is None else np.asarray(theta_grid)
    ms = default_m_grid() if m_grid is None else m_grid
    worst = 0.0
    for m in ms:
        keep = ~excluded_mask(case_id, theta, m)
        diff = np.abs(example_g(case_id, theta[keep], m) - psi_direct(case_id, theta[keep], m).real)
        if diff.size:
            worst = max(worst, float(diff.max()))
    return worst


@dataclass
class ScanReport:
    case_id: str
    omega: str
    samples: int = 0
    violations: list = field(default_factory=list)
    boundary_contacts: list = field(default_factory=list)
    excluded: list = field(default_factory=list)
    min_re: float = math.inf
    rows: list = field(default_factory=list, repr=False)

    @property
    def clean(self):
        return not self.violations

    def to_json(self):
        return {"case": self.case_id, "omega": self.omega, "samples": self.samples,
                "min_re_psi": self.min_re, "violations": self.violations,
                "boundary_contacts": self.boundary_contacts,
                "excluded": self.excluded}

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "m", "re_psi", "im_psi", "verdict"])
        for th, m, re, im, v in self.rows:
            w.writerow([_g17(th), _g17(m), _g17(re), _g17(im), v])
        return buf.getvalue()


def _g17(x):
    return "inf" if math.isinf(x) else format(x, ".17g")


_VERDICT = {1: "inside", 0: "boundary-contact", -1: "outside"}


def admissibility_scan(case_id, targets=None, theta_grid=None, m_grid=None):
    """Classify ψ(r, s) against every Ω; 'inside' verdicts are violations."""
    targets = targets or [domains.make_domain(t) for t in DEFAULT_OMEGAS[case_id]]
    theta = default_theta_grid(case_id) if theta_grid is None else np.asarray(theta_grid)
    ms = default_m_grid() if m_grid is None else m_grid
    reports = []
    for dom in targets:
        rep = ScanReport(case_id, dom.label)
        for m in ms:
            skip = excluded_mask(case_id, theta, m)
            rep.excluded.extend({"theta": float(t), "m": float(m)} for t in theta[skip])
            th = theta[~skip]
            psi = psi_direct(case_id, th, m)
            verdict = domains.classify(dom, psi)
            rep.samples += len(th)
            if len(th):
                rep.min_re = min(rep.min_re, float(psi.real.min()))
            for t, w, v in zip(th, psi, verdict):
                entry = {"theta": float(t), "m": float(m), "psi": [w.real, w.imag]}
                if v == 1:
                    rep.violations.append(entry)
                elif v == 0:
                    rep.boundary_contacts.append(entry)
                rep.rows.append((float(t), float(m), w.real, w.imag, _VERDICT[int(v)]))
        key = lambda e: (e["theta"], e["m"])
        rep.violations.sort(key=key)
        rep.boundary_contacts.sort(key=key)
        rep.excluded.sort(key=key)
        rep.rows.sort()
        reports.append(rep)
    return reports
