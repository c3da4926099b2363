"""Grid-based subordination checks and the falsification search for the
harmonic-mean subordination lemma.

Verdicts are only as good as the declared grids: a map is "subordinate on the
grid" when it matches h(0) and no sampled image point is classified outside
the target.  Boundary-band verdicts never count against subordination.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import domains, fncat, means
from .errors import ConfigError, EvaluationError, NonRemovableSingularity

DEFAULT_RADII = (0.5, 0.9, 0.99, 0.999)
DEFAULT_N = 1024
DEFAULT_SEED = 0xC0FFEE
ORIGIN_TOL = 1e-9
MAX_SINGULAR_RATE = 0.01


def thread_count():
    try:
        return max(1, int(os.environ.get("SUBORDKIT_THREADS", "1")))
    except ValueError:
        raise ConfigError("SUBORDKIT_THREADS must be an integer")


def circle_grid(radii, n):
    radii = np.asarray(radii, dtype=float)
    return radii[:, None] * np.exp(2j * np.pi * np.arange(n) / n)[None, :]


@dataclass
class Witness:
    radius: float
    index: int
    value: complex

    def to_json(self):
        return {"radius": self.radius, "k": self.index,
                "value": [self.value.real, self.value.imag]}


@dataclass
class SubordinationResult:
    subordinate: bool
    origin_gap: float
    witness: Witness | None = None

    def __bool__(self):
        return self.subordinate


def _first_outside(verdicts, radii, values):
    bad = verdicts < 0
    if not bad.any():
        return None
    i, k = np.argwhere(bad)[0]
    return Witness(float(radii[i]), int(k), complex(values[i, k]))


def is_subordinate(p: fncat.AnalyticMap, dom: domains.TargetDomain,
                   radii=DEFAULT_RADII, n: int = DEFAULT_N) -> SubordinationResult:
    """Check p(0) = h(0) and p(r e^{2πik/n}) ∉ outside(h(D)) for every sampled point."""
    if n < 256:
        raise ValueError("n must be at least 256")
    gap = abs(fncat.evaluate(p, 0)[0] - dom.h0)
    if gap > ORIGIN_TOL:
        return SubordinationResult(False, gap)
    z = circle_grid(radii, n)
    values = fncat.evaluate(p, z)[0]
    witness = _first_outside(domains.classify(dom, values), radii, values)
    return SubordinationResult(witness is None, gap, witness)


# --------------------------------------------------------------------------
# condition on (Θ, Φ, h)


@dataclass
class HypoReport:
    minimum: float
    z_at: complex
    zeta_at: complex
    holds: bool
    grid_points: int
    zeta_points: int
    excluded_corners: int

    def to_json(self):
        d = asdict(self)
        d["z_at"] = [self.z_at.real, self.z_at.imag]
        d["zeta_at"] = [self.zeta_at.real, self.zeta_at.imag]
        return d


def boundary_ratio_samples(dom, n_zeta, min_derivative=1e-12):
    """``h(ζ) / (ζ h'(ζ))`` on n_zeta boundary points, corners excluded."""
    theta = 2 * np.pi * np.arange(n_zeta) / n_zeta
    keep = ~fncat._near_corner(theta, dom.corner_params)
    zeta = np.exp(1j * theta[keep])
    h, h1, _ = fncat.evaluate(dom.map, zeta)
    small = np.abs(h1) < min_derivative
    if small.any():
        raise EvaluationError(f"h'(ζ) vanishes at ζ={zeta[small][0]}", zeta[small][0])
    return zeta, h / (zeta * h1), int((~keep).sum())


def hypo_check(pair: means.ThetaPhiPair, dom: domains.TargetDomain,
               zgrid: fncat.DiskGrid, n_zeta: int = 1024) -> HypoReport:
    """Minimum of Re[Φ(z) + h(ζ)/(ζh'(ζ)) (Θ(z) - 1)] over the sampled (z, ζ)."""
    z = zgrid.points().ravel()
    th = fncat.evaluate(pair.theta, z)[0]
    ph = fncat.evaluate(pair.phi, z)[0]
    zeta, K, skipped = boundary_ratio_samples(dom, n_zeta)
    vals = ph.real[:, None] + (K[None, :] * (th - 1)[:, None]).real
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    m = float(vals[i, j])
    return HypoReport(m, complex(z[i]), complex(zeta[j]), m > 0, len(z), len(zeta), skipped)


# --------------------------------------------------------------------------
# falsification search


@dataclass(frozen=True)
class SamplerConfig:
    """Random analytic p with p(0) = h(0).

    ``blaschke``: p = h(c B(z)) with B a random polynomial of degree <= 3,
    B(0) = 0 and sup |B| = 1 on a 1024-point circle, c uniform in
    [c_min, c_max].  ``perturb``: p = h((1 - s) z) + s ε z² with s uniform in
    [0, s_max] and ε standard complex normal.
    """

    seed: int = DEFAULT_SEED
    perturb_fraction: float = 0.25
    c_min: float = 0.1
    c_max: float = 0.95
    s_max: float = 0.1
    radii: tuple = DEFAULT_RADII
    n: int = DEFAULT_N
    max_draw_factor: int = 100


def draw_sample(dom: domains.TargetDomain, cfg: SamplerConfig, index: int):
    rng = np.random.default_rng([cfg.seed, index])
    if rng.random() < cfg.perturb_fraction:
        s = rng.uniform(0, cfg.s_max)
        eps = complex(rng.normal(), rng.normal())
        p = fncat.scale(dom.map, 1 - s) + fncat.polynomial([0, 0, s * eps])
        return p, {"family": "perturb", "s": s, "eps": [eps.real, eps.imag]}
    degree = int(rng.integers(1, 4))
    b = rng.normal(size=degree) + 1j * rng.normal(size=degree)
    circle = np.exp(2j * np.pi * np.arange(1024) / 1024)
    sup = np.max(np.abs(np.polynomial.polynomial.polyval(circle, np.concatenate([[0], b]))))
    c = rng.uniform(cfg.c_min, cfg.c_max)
    coeffs = np.concatenate([[0], c * b / sup])
    p = fncat.substitute(dom.map, fncat.polynomial(list(coeffs)))
    return p, {"family": "blaschke", "c": c,
               "coeffs": [[x.real, x.imag] for x in coeffs[1:]]}


@dataclass
class SampleOutcome:
    index: int
    status: str  # "premise-fails", "premise-holds", "singular", "eval-error"
    violation: dict | None = None


def _evaluate_sample(pair, t, dom, cfg, z, theta_z, phi_z, index):
    p, meta = draw_sample(dom, cfg, index)
    if abs(fncat.evaluate(p, 0)[0] - dom.h0) > ORIGIN_TOL:
        raise AssertionError("sampler produced p(0) != h(0)")
    try:
        # cheap rejection on the outermost ring (coarse, then full), where
        # premise failures concentrate; only gross failures are decided here
        if t:
            for sl in (slice(None, None, 16), slice(None)):
                zr = z[-1, sl]
                pv, p1, _ = fncat.evaluate(p, zr)
                H, singular = means.h_operator_masked(
                    pair, (pv, p1), theta_z[-1, sl], phi_z[-1, sl], zr, t)
                if not singular.any() and domains.clearly_outside(dom, H).any():
                    return SampleOutcome(index, "premise-fails")
        pv, p1, _ = fncat.evaluate(p, z)
    except EvaluationError:
        return SampleOutcome(index, "eval-error")
    if t == 0:
        H = pv
    else:
        H, singular = means.h_operator_masked(pair, (pv, p1), theta_z, phi_z, z, t)
        if singular.any():
            try:
                for idx in np.argwhere(singular):
                    H[tuple(idx)] = means.removable_limit(pair, p, t, z[tuple(idx)])
            except NonRemovableSingularity:
                return SampleOutcome(index, "singular")
    if domains.clearly_outside(dom, H).any():
        return SampleOutcome(index, "premise-fails")
    premise = domains.classify(dom, H)
    if not (premise == 1).all():
        return SampleOutcome(index, "premise-fails")
    verdict = domains.classify(dom, pv)
    witness = _first_outside(verdict, cfg.radii, pv)
    if witness is None:
        return SampleOutcome(index, "premise-holds")
    bad_rows = (verdict < 0).any(axis=1)
    first = int(np.argmax(bad_rows))
    violation = {"index": index, "sample": meta, "witness": witness.to_json(),
                 "monotone_radii": bool(bad_rows[first:].all())}
    return SampleOutcome(index, "premise-holds", violation)


@dataclass
class FalsificationReport:
    t: float
    domain: str
    premise_target: int
    drawn: int = 0
    premise_holding: int = 0
    singular: int = 0
    eval_errors: int = 0
    violations: list = field(default_factory=list)
    grids: dict = field(default_factory=dict)

    @property
    def premise_rate(self):
        return self.premise_holding / self.drawn if self.drawn else 0.0

    @property
    def complete(self):
        return self.premise_holding >= self.premise_target

    def to_json(self):
        return {"t": self.t, "domain": self.domain, "premise_target": self.premise_target,
                "drawn": self.drawn, "premise_holding": self.premise_holding,
                "premise_rate": self.premise_rate, "singular_excluded": self.singular,
                "eval_errors": self.eval_errors, "violations": self.violations,
                "grids": self.grids}


def falsify_lemma(pair: means.ThetaPhiPair, t: float, dom: domains.TargetDomain,
                  family: SamplerConfig | None = None, budget: int = 10_000,
                  threads: int | None = None) -> FalsificationReport:
    """Search for p with H_t(p) ≺ h on the grid but p not ≺ h on the grid.

    Samples are drawn until ``budget`` of them satisfy the premise (or the
    draw cap ``budget * max_draw_factor`` is reached).  Samples whose
    operator has a non-removable singularity on the grid are excluded and
    counted; if they exceed 1% of draws the sampler is considered broken.
    """
    cfg = family or SamplerConfig()
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    z = circle_grid(cfg.radii, cfg.n)
    theta_z = fncat.evaluate(pair.theta, z)[0]
    phi_z = fncat.evaluate(pair.phi, z)[0]
    report = FalsificationReport(t, dom.label, budget,
                                 grids={"radii": list(cfg.radii), "n": cfg.n, "seed": cfg.seed})
    threads = threads or thread_count()
    max_draws = budget * cfg.max_draw_factor
    batch = 256
    start = 0
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while report.premise_holding < budget and start < max_draws:
            idx = range(start, min(start + batch, max_draws))
            run = lambda i: _evaluate_sample(pair, t, dom, cfg, z, theta_z, phi_z, i)
            outcomes = list(pool.map(run, idx)) if pool else [run(i) for i in idx]
            for o in outcomes:
                if report.premise_holding >= budget:
                    break
                report.drawn += 1
                if o.status == "premise-holds":
                    report.premise_holding += 1
                    if o.violation:
                        report.violations.append(o.violation)
                elif o.status == "singular":
                    report.singular += 1
                elif o.status == "eval-error":
                    report.eval_errors += 1
            start += batch
    finally:
        if pool:
            pool.shutdown()
    if report.drawn and report.singular > MAX_SINGULAR_RATE * report.drawn:
        raise ConfigError(f"{report.singular} of {report.drawn} samples hit non-removable "
                          "singularities; sampler configuration is unsuitable")
    report.violations.sort(key=lambda v: v["index"])
    return report
