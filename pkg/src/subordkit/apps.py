"""Sufficient-condition checkers and function-class verifiers built on the
harmonic-mean lemma and the threshold theorems.

All verdicts are grid verdicts.  Implications are checked with
"grid-implication" semantics: a violation is reported only when the premise
holds with margin > ``PREMISE_MARGIN`` and the conclusion fails by more than
``CONCLUSION_TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import domains, fncat, means, subord, thresholds
from .errors import EvaluationError, NotConvexError, ParameterError

PREMISE_MARGIN = 0.01
CONCLUSION_TOL = 1e-6
MS_TOL = 1e-9
DEFAULT_ZGRID = fncat.DiskGrid((0.25, 0.5, 0.75, 0.9, 0.99, 0.999), 512)


def _argmin(values, points):
    k = int(np.argmin(values))
    return float(values.ravel()[k]), complex(points.ravel()[k])


@dataclass
class ConditionResult:
    which: str
    min_margin: float
    at: complex
    holds: bool
    extra: dict = field(default_factory=dict)

    def to_json(self):
        return {"which": self.which, "min_margin": self.min_margin,
                "at": [self.at.real, self.at.imag], "holds": self.holds} | self.extra


def condition_check(which, pair: means.ThetaPhiPair, aux=None, zgrid=DEFAULT_ZGRID):
    """Slack of the sufficient conditions on (Θ, Φ) over zgrid.

    hypo2: Re Φ - (5|Θ-1| - Re(Θ-1)) >= 0
    hypo3: Re Φ - 6(M+1) >= 0 together with |Θ| <= M  (aux = {"M": ...})
    z1:    Re Φ - 2(|Θ-1| - Re(Θ-1)) > 0
    power: Θ'(0) > 0, Re Φ > 0 and the lemma hypothesis for h = ((1+z)/(1-z))^γ
           (aux = {"gamma": ...}); Φ is the pair's Φ.
    """
    aux = aux or {}
    z = zgrid.points()
    th = fncat.evaluate(pair.theta, z)[0]
    ph = fncat.evaluate(pair.phi, z)[0]
    d = th - 1
    if which == "hypo2":
        m, at = _argmin(ph.real - (5 * np.abs(d) - d.real), z)
        return ConditionResult(which, m, at, m >= 0)
    if which == "hypo3":
        M = float(aux["M"])
        sup_theta = float(np.abs(th).max())
        m, at = _argmin(ph.real - 6 * (M + 1), z)
        return ConditionResult(which, m, at, m >= 0 and sup_theta <= M,
                               {"M": M, "sup_abs_theta": sup_theta})
    if which == "z1":
        m, at = _argmin(ph.real - 2 * (np.abs(d) - d.real), z)
        return ConditionResult(which, m, at, m > 0)
    if which == "power":
        gamma = float(aux.get("gamma", 0.5))
        theta1 = complex(fncat.evaluate(pair.theta, 0)[1])
        pre = theta1.imag == 0 and theta1.real > 0
        re_phi, at_phi = _argmin(ph.real, z)
        zeta = np.exp(2j * np.pi * (np.arange(1024) + 0.5) / 1024)
        pos = ((d.ravel()[:, None] * (1 - zeta**2) / (2 * gamma * zeta))[None]).real
        pos_min = float(pos.min())
        dom = domains.make_domain("power", gamma=gamma)
        hyp = subord.hypo_check(pair, dom, zgrid, 1024)
        return ConditionResult(which, hyp.minimum, hyp.z_at, pre and re_phi > 0 and hyp.holds,
                               {"gamma": gamma, "theta_prime_0": [theta1.real, theta1.imag],
                                "precondition": pre, "min_re_phi": re_phi,
                                "positivity_min": pos_min})
    raise ValueError(f"unknown condition {which!r}")


# --------------------------------------------------------------------------
# Marx–Strohhäcker numeric step


@dataclass
class MSReport:
    domain: str
    convex_deviation: float
    min_abs_derivative: float
    ratio_deviation: float
    excluded: list
    samples: int

    @property
    def holds(self):
        return (self.convex_deviation <= 1 + MS_TOL and self.min_abs_derivative >= 0.25 - MS_TOL
                and self.ratio_deviation <= 5 + MS_TOL)

    def to_json(self):
        return {"domain": self.domain, "max_abs_h1_ratio_minus_1": self.convex_deviation,
                "min_abs_h_prime": self.min_abs_derivative,
                "max_abs_h_ratio_minus_1": self.ratio_deviation,
                "excluded_corners": self.excluded, "samples": self.samples,
                "holds": self.holds}


def marx_strohhacker_check(dom: domains.TargetDomain, n: int = 4096,
                           allow_nonconvex: bool = False) -> MSReport:
    """Boundary deviations |h1/(ζh1') - 1|, |h'|, |h/(ζh') - 1| with h1 = h - 1."""
    if not dom.convex and not allow_nonconvex:
        raise NotConvexError(f"{dom.label} is not convex")
    if abs(dom.h0 - 1) > 1e-12:
        raise ParameterError(f"{dom.label} has h(0) = {dom.h0}, need 1")
    theta = 2 * np.pi * np.arange(n) / n
    corner = fncat._near_corner(theta, dom.corner_params)
    zeta = np.exp(1j * theta[~corner])
    h, h1, _ = fncat.evaluate(dom.map, zeta)
    if np.any(np.abs(h1) < 1e-12):
        raise EvaluationError(f"h' vanishes on the boundary of {dom.label}")
    dev1 = np.abs((h - 1) / (zeta * h1) - 1)
    dev5 = np.abs(h / (zeta * h1) - 1)
    return MSReport(dom.label, float(dev1.max()), float(np.abs(h1).min()), float(dev5.max()),
                    [float(t) for t in theta[corner]], int(zeta.size))


# --------------------------------------------------------------------------
# close-to-convexity


def close_to_convex_check(f: fncat.AnalyticMap, g: fncat.AnalyticMap, zgrid=DEFAULT_ZGRID):
    """Premise Re(2zf'/g - 2z f'² / (3gf' + zf''g - zg'f')) > 0 and conclusion Re(zf'/g) > 0."""
    z = zgrid.points()
    fv, f1, f2 = fncat.evaluate(f, z)
    gv, g1, _ = fncat.evaluate(g, z)
    den = 3 * gv * f1 + z * f2 * gv - z * g1 * f1
    bad = (np.abs(den) < 1e-14) | (np.abs(gv) < 1e-14)
    out = {"denominator_zeros": [[w.real, w.imag] for w in z[bad]]}
    if bad.any():
        out.update(premise_min=None, conclusion_min=None, premise_holds=False, verdict="undefined")
        return out
    expr = 2 * z * f1 / gv - 2 * z * f1**2 / den
    p = z * f1 / gv
    pm, pat = _argmin(expr.real, z)
    cm, cat = _argmin(p.real, z)
    premise = pm > 0
    violation = pm > PREMISE_MARGIN and cm < -CONCLUSION_TOL
    out.update(premise_min=pm, premise_at=[pat.real, pat.imag], conclusion_min=cm,
               conclusion_at=[cat.real, cat.imag], premise_holds=premise,
               conclusion_holds=cm > 0, implication_violated=violation,
               verdict="violation" if violation else ("close-to-convex" if premise and cm > 0
                                                      else "premise-fails" if not premise
                                                      else "inconclusive"))
    return out


# --------------------------------------------------------------------------
# corollaries of the threshold theorem


def substitution(which, f, z):
    """(p, zp') for p = zf'/f, f', or f/z."""
    fv, f1, f2 = fncat.evaluate(f, z)
    if which == "starlike36":
        if np.any(np.abs(fv) < 1e-14):
            raise EvaluationError("f vanishes on the grid; zf'/f undefined")
        p = z * f1 / fv
        zp = p * (1 + z * f2 / f1 - p)
    elif which == "univalent38":
        p, zp = f1, z * f2
    elif which == "fz39":
        p = fv / z
        zp = f1 - p
    else:
        raise ValueError(f"unknown corollary {which!r}")
    return p, zp


def _on_cut(w):
    return (w.imag == 0) & (w.real <= 0)


def premise_expression(params: thresholds.ThresholdParams, p, zp):
    """γ p^δ + (1-γ) p^μ (p + zp'/p)^{1-μ} / (1 + ρ zp'/p²), principal branches.

    Returns (values, excluded) where excluded flags samples whose power bases
    lie on the branch cut.
    """
    g, d, mu, rho = params.gamma, params.delta, params.mu, params.rho
    q = p + zp / p
    excluded = np.zeros(p.shape, dtype=bool)
    if d != int(d) or mu not in (0.0, 1.0):
        excluded |= _on_cut(p)
    if mu != 1:
        excluded |= _on_cut(q) & (1 - mu != int(1 - mu))
    safe = lambda w: np.where(excluded, 1, w)
    with np.errstate(all="ignore"):
        val = g * safe(p) ** d + (1 - g) * safe(p) ** mu * safe(q) ** (1 - mu) / (
            1 + rho * zp / p**2)
    return val, excluded


def corollary_check(which, f: fncat.AnalyticMap, params: thresholds.ThresholdParams,
                    zgrid=DEFAULT_ZGRID, dense_factor=4):
    """Premise min over zgrid against β; if it clears β, check Re p > α on a denser grid."""
    f0, f1_0, _ = fncat.evaluate(f, 0)
    if abs(f0) > 1e-12 or abs(f1_0 - 1) > 1e-12:
        raise ParameterError("f must satisfy f(0) = 0, f'(0) = 1")
    beta = thresholds.threshold_sup(params, "thm210")
    z = zgrid.points()
    try:
        p, zp = substitution(which, f, z)
    except EvaluationError as exc:
        return {"corollary": which, "verdict": "undefined", "error": str(exc)}
    val, excluded = premise_expression(params, p, zp)
    re = np.where(excluded, np.inf, val.real)
    pm, pat = _argmin(re, z)
    dense = fncat.DiskGrid(zgrid.radii, zgrid.angular_count * dense_factor).points()
    pd, _ = substitution(which, f, dense)
    cm, cat = _argmin(pd.real, dense)
    premise_margin = pm - beta
    conclusion_deficit = params.alpha - cm
    violation = premise_margin > PREMISE_MARGIN and conclusion_deficit > CONCLUSION_TOL
    if premise_margin > 0:
        verdict = "violation" if violation else ("conclusion-holds" if cm > params.alpha
                                                 else "inconclusive")
    else:
        verdict = "premise-fails"
    return {"corollary": which, "beta": beta, "premise_min": pm,
            "premise_at": [pat.real, pat.imag], "premise_margin": premise_margin,
            "excluded_branch_cut": int(excluded.sum()), "conclusion_min_re_p": cm,
            "conclusion_at": [cat.real, cat.imag], "alpha": params.alpha,
            "implication_violated": violation, "verdict": verdict}
