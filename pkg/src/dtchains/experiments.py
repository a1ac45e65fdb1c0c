"""Desk-scale numerical experiments on the compact relative components.

Every experiment is a pure function of its configuration: the random
stream is seeded, reports embed the exact config and tolerances, and a
rerun with the same inputs produces byte-identical output.  Verdict
strings describe statistical trends at documented thresholds, never
theorem claims.
"""

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__, dynamics
from .chain import ActionAngleCoords, AngleVector, build_chain
from .dynamics import QUANTUM, RECANON_EVERY, dehn_twist, fd_jacobian, poisson_fd
from .hyperbolic import TAU, classify, oriented_angle
from .rep import (
    angle_function,
    chain_to_rep,
    delta_parts,
    epsilon_parts,
    evaluate_word,
    fingerprint,
    restrict_rep,
)
from .surface import pair_curve, parse_label, standard_curves

log = logging.getLogger(__name__)

#: Thresholds a config may override; every report echoes the merged set.
DEFAULT_TOLERANCES = {
    "quantum": QUANTUM,  # fingerprint bin width
    "match_tol": 1e-9,  # fiber scans: two samples count as the same point
    "window": 0.1,  # gamma-distance to {0, pi} that switches delta -> epsilon
    "det_tol": 1e-4,  # |det| above this counts as full rank
    "drop_tol": 1e-6,  # |det| below this counts as a rank drop
    "triple_tol": 1e-3,  # n=4: largest of the three pairings must beat this
    "commutation_tol": 1e-8,  # gluing: angle residual bound
    "rational_tol": 1e-8,
    "q_max": 10000,
}

DENSITY_CHECKPOINTS = (1_000, 10_000, 100_000)
GRID = 8  # bins per axis of the density histogram


class ConfigError(ValueError):
    """Config rejected; ``path`` locates the offending field."""

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


def _expect(cond, path, message):
    if not cond:
        raise ConfigError(path, message)


def _number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


@dataclass(frozen=True)
class ExperimentConfig:
    """Input contract shared by all experiments.

    ``start`` is either the string "random" (drawn from the seeded
    stream, interior moment values) or explicit coordinates.  ``gens``
    are curve labels, defaulting to every standard b/d/e curve.
    ``steps`` means walk length for density/orbit runs, sample count
    for scans, and trial count for gluing.
    """

    n: int
    alpha: tuple
    start: object = "random"
    gens: tuple = ()
    steps: int = 1000
    seed: int = 0
    out: str = None
    kind: str = None  # scan flavor: "fiber" | "transversality"
    strategy: str = "walk"  # orbit flavor: "walk" | "bfs"
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        _expect(isinstance(self.n, int) and self.n >= 4, "n", "expected an integer >= 4")
        try:
            av = AngleVector(tuple(self.alpha))
        except (TypeError, ValueError) as exc:
            raise ConfigError("alpha", str(exc)) from None
        _expect(av.n == self.n, "alpha", f"expected {self.n} entries, got {av.n}")
        object.__setattr__(self, "alpha", av.alpha)
        if self.start != "random":
            if isinstance(self.start, dict):
                object.__setattr__(self, "start", _coords_from_dict(self.start, self.n))
            _expect(
                isinstance(self.start, ActionAngleCoords)
                and len(self.start.beta) == self.n - 3,
                "start",
                'expected "random" or {"beta": [...], "gamma": [...]} '
                f"with {self.n - 3} slots",
            )
        gens = tuple(self.gens)
        if not gens:
            fams = standard_curves(self.n)
            gens = tuple(c.label for f in "bde" for c in fams[f])
        for k, label in enumerate(gens):
            try:
                parse_label(label, self.n)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"gens[{k}]", str(exc)) from None
        object.__setattr__(self, "gens", gens)
        _expect(isinstance(self.steps, int) and self.steps >= 1, "steps", "expected an integer >= 1")
        _expect(isinstance(self.seed, int) and self.seed >= 0, "seed", "expected an integer >= 0")
        _expect(self.out is None or isinstance(self.out, str), "out", "expected a path string")
        _expect(
            self.kind in (None, "fiber", "transversality"),
            "kind",
            'expected "fiber" or "transversality"',
        )
        _expect(self.strategy in ("walk", "bfs"), "strategy", 'expected "walk" or "bfs"')
        _expect(isinstance(self.tolerances, dict), "tolerances", "expected an object")
        for key, val in self.tolerances.items():
            _expect(key in DEFAULT_TOLERANCES, f"tolerances.{key}", "unknown tolerance")
            _expect(_number(val) and val > 0, f"tolerances.{key}", "expected a positive number")

    # -- derived views ------------------------------------------------

    def tol(self, name):
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def curves(self):
        return [parse_label(label, self.n) for label in self.gens]

    def start_coords(self, rng):
        if self.start == "random":
            return sample_interior_coords(self.alpha, rng)
        return self.start

    def to_dict(self):
        start = self.start
        if isinstance(start, ActionAngleCoords):
            start = {"beta": list(start.beta), "gamma": start.gamma_list()}
        return {
            "n": self.n,
            "alpha": list(self.alpha),
            "start": start,
            "gens": list(self.gens),
            "steps": self.steps,
            "seed": self.seed,
            "out": self.out,
            "kind": self.kind,
            "strategy": self.strategy,
            "tolerances": {k: self.tol(k) for k in sorted(DEFAULT_TOLERANCES)},
        }

    @classmethod
    def from_dict(cls, doc):
        _expect(isinstance(doc, dict), "$", "expected a JSON object")
        known = {
            "n", "alpha", "alpha_over_pi", "start", "gens", "steps",
            "seed", "out", "kind", "strategy", "tolerances",
        }
        for key in doc:
            _expect(key in known, key, "unknown key")
        _expect("n" in doc, "n", "required")
        _expect(
            ("alpha" in doc) != ("alpha_over_pi" in doc),
            "alpha",
            "give exactly one of alpha (radians) or alpha_over_pi",
        )
        if "alpha_over_pi" in doc:
            raw = doc["alpha_over_pi"]
            _expect(
                isinstance(raw, list) and all(_number(x) for x in raw),
                "alpha_over_pi",
                "expected a list of numbers",
            )
            alpha = tuple(x * math.pi for x in raw)
        else:
            raw = doc["alpha"]
            _expect(
                isinstance(raw, list) and all(_number(x) for x in raw),
                "alpha",
                "expected a list of numbers",
            )
            alpha = tuple(float(x) for x in raw)
        kwargs = {}
        for key in ("start", "gens", "steps", "seed", "out", "kind", "strategy", "tolerances"):
            if key in doc and doc[key] is not None:
                kwargs[key] = doc[key]
        if "gens" in kwargs:
            _expect(
                isinstance(kwargs["gens"], list)
                and all(isinstance(s, str) for s in kwargs["gens"]),
                "gens",
                "expected a list of curve labels",
            )
            kwargs["gens"] = tuple(kwargs["gens"])
        return cls(n=doc["n"], alpha=alpha, **kwargs)

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON: {exc}") from None
        return cls.from_dict(doc)


def _coords_from_dict(doc, n):
    for key in doc:
        _expect(key in ("beta", "gamma"), f"start.{key}", "unknown key")
    beta = doc.get("beta")
    _expect(
        isinstance(beta, list) and len(beta) == n - 3 and all(_number(x) for x in beta),
        "start.beta",
        f"expected a list of {n - 3} numbers",
    )
    gamma = doc.get("gamma")
    slots = {}
    if gamma is not None:
        if isinstance(gamma, dict):
            items = []
            for key, val in gamma.items():
                _expect(str(key).isdigit(), f"start.gamma.{key}", "expected a slot index")
                items.append((int(key), val))
        else:
            _expect(
                isinstance(gamma, list) and len(gamma) == n - 3,
                "start.gamma",
                f"expected a list of {n - 3} numbers-or-nulls",
            )
            items = [(i + 1, val) for i, val in enumerate(gamma) if val is not None]
        for slot, val in items:
            _expect(_number(val), f"start.gamma[{slot}]", "expected a number")
            slots[slot] = float(val)
    try:
        return ActionAngleCoords(tuple(beta), slots)
    except ValueError as exc:
        raise ConfigError("start", str(exc)) from None


def _meta(cfg):
    doc = cfg.to_dict()
    doc["out"] = None  # where a report is written is not part of what it says
    return {"config": doc, "package": f"dtchains {__version__}"}


# ---------------------------------------------------------------------------
# shared sampling helpers


def beta_from_mu(alpha, mu):
    """Invert the moment formulas: actions from normalized areas."""
    if not isinstance(alpha, AngleVector):
        alpha = AngleVector(tuple(alpha))
    a, lam = alpha.alpha, alpha.lam
    beta = [4.0 * math.pi - a[0] - a[1] + 2.0 * lam * mu[0]]
    for i in range(1, alpha.n - 3):
        beta.append(beta[-1] + 2.0 * math.pi - a[i + 1] + 2.0 * lam * mu[i])
    return tuple(beta)


def sample_interior_coords(alpha, rng, floor=0.05):
    """A random point with every triangle fat and angles uniform."""
    if not isinstance(alpha, AngleVector):
        alpha = AngleVector(tuple(alpha))
    w = rng.random(alpha.n - 2) + floor
    mu = w / (2.0 * w.sum())
    beta = beta_from_mu(alpha, mu)
    gamma = {i: float(rng.uniform(0.0, TAU)) for i in range(1, alpha.n - 2)}
    return ActionAngleCoords(beta, gamma)


def _regular_coords(alpha, rng, margin=0.15):
    """Interior coords with every gamma clear of both bracket zero loci."""
    coords = sample_interior_coords(alpha, rng, floor=0.1)
    gamma = {}
    for i in range(1, alpha.n - 2):
        half = coords.beta[i - 1] / 2.0
        loci = (0.0, math.pi, half % TAU, (half - math.pi) % TAU)
        g = coords.gamma[i]
        while dynamics._locus_distance(g, loci) < margin:
            g = float(rng.uniform(0.0, TAU))
        gamma[i] = g
    return ActionAngleCoords(coords.beta, gamma)


def _angle_gap(x, y):
    d = abs(x - y) % TAU
    return min(d, TAU - d)


# ---------------------------------------------------------------------------
# density


@dataclass(frozen=True)
class DensityReport:
    """Histogram + discrepancy trend for one random-twist walk."""

    counts: tuple
    total: int
    cells_visited: int
    checkpoints: tuple
    non_increasing: bool
    rational_flag: bool
    verdict: str
    rules: dict
    meta: dict

    def __post_init__(self):
        binned = sum(sum(row) for row in self.counts)
        if binned != self.total:
            raise ValueError(f"bin counts sum to {binned}, expected {self.total}")

    def to_dict(self):
        return {
            "counts": [list(row) for row in self.counts],
            "total": self.total,
            "cells_visited": self.cells_visited,
            "checkpoints": [dict(c) for c in self.checkpoints],
            "non_increasing": self.non_increasing,
            "rational_flag": self.rational_flag,
            "verdict": self.verdict,
            "rules": self.rules,
            "meta": self.meta,
        }


_DENSITY_RULES = {
    "reference": "uniform product measure on (beta_1, gamma_1); 8x8 grid-anchored boxes",
    "statistic": "max over boxes [0,a]x[0,b] of |empirical mass - a*b|",
    "trend": "discrepancy at the last checkpoint strictly below the first",
    "non_increasing": "discrepancy never rises by more than 1e-12 between checkpoints",
}


def _star_discrepancy(counts):
    total = counts.sum()
    if total == 0:
        return 1.0
    cum = counts.cumsum(axis=0).cumsum(axis=1) / float(total)
    edges = np.arange(1, GRID + 1) / GRID
    return float(np.abs(cum - np.outer(edges, edges)).max())


def _cell_n4(rep, lo, lam):
    """Normalized (action, angle) of a 4-puncture point, read off the matrices."""
    cls = classify(evaluate_word(rep, (-2, -1)))
    c2 = classify(rep.gens[1]).fixed_point
    c3 = classify(rep.gens[2]).fixed_point
    u = (cls.angle - lo) / lam
    v = (oriented_angle(cls.fixed_point, c3, c2) % TAU) / TAU
    return min(max(u, 0.0), 1.0 - 1e-12), v


def _density_report(cfg, counts, total, marks, rational_flag, verdict):
    disc = [m["discrepancy"] for m in marks]
    non_inc = all(b <= a + 1e-12 for a, b in zip(disc, disc[1:]))
    if verdict is None:
        if len(disc) < 2:
            verdict = "insufficient-checkpoints"
        elif disc[-1] < disc[0]:
            verdict = "equidistribution-trend"
        else:
            verdict = "stalled"
        if rational_flag:
            verdict = "possibly finite orbit; " + verdict
    return DensityReport(
        counts=tuple(tuple(int(x) for x in row) for row in counts),
        total=int(total),
        cells_visited=int(np.count_nonzero(counts)),
        checkpoints=tuple(marks),
        non_increasing=non_inc,
        rational_flag=rational_flag,
        verdict=verdict,
        rules=_DENSITY_RULES,
        meta=_meta(cfg),
    )


def density_experiment(cfg):
    """Random-twist walk, binned against the uniform (beta, gamma) measure.

    Implemented for n = 4 where the reference cell is literally the
    rectangle (beta_1 range) x (gamma_1 circle).  The walk reads the
    cell coordinates straight off the matrices each step, so 1e5 steps
    stay cheap; the representation is rebuilt through its coordinates
    on the usual schedule to shed float drift.
    """
    if cfg.n != 4:
        raise ConfigError("n", "density experiment is implemented for n = 4")
    alpha = AngleVector(cfg.alpha)
    rng = np.random.default_rng(cfg.seed)
    coords0 = cfg.start_coords(rng)
    curves = cfg.curves()
    quantum = cfg.tol("quantum")
    rep = chain_to_rep(build_chain(alpha, coords0))

    reports = [
        dynamics.rational_angle(
            angle_function(rep, c), q_max=int(cfg.tol("q_max")), tol=cfg.tol("rational_tol")
        )
        for c in curves
    ]
    rational_flag = all(r.match is not None for r in reports)

    zeros = np.zeros((GRID, GRID), dtype=np.int64)
    fp0 = fingerprint(rep, quantum=quantum)
    if all(fingerprint(dehn_twist(rep, c), quantum=quantum) == fp0 for c in curves):
        return _density_report(cfg, zeros, 0, (), rational_flag, "Finite(1)")
    if rational_flag:
        probe = dynamics.orbit_explore(
            alpha, coords0, curves,
            max_steps=min(cfg.steps, 4096), strategy="bfs", quantum=quantum,
        )
        if probe.verdict == "finite":
            return _density_report(cfg, zeros, 0, (), rational_flag, f"Finite({probe.size})")

    lo = 4.0 * math.pi - alpha.alpha[0] - alpha.alpha[1]
    checkpoints = [c for c in DENSITY_CHECKPOINTS if c <= cfg.steps]
    if cfg.steps not in checkpoints:
        checkpoints.append(cfg.steps)
    counts = zeros
    marks = []
    for step in range(1, cfg.steps + 1):
        curve = curves[int(rng.integers(len(curves)))]
        power = 1 if int(rng.integers(2)) == 0 else -1
        try:
            rep = dehn_twist(rep, curve, power)
            if step % RECANON_EVERY == 0 or rep.product_residual() > 1e-8:
                rep = dynamics._recanonicalize(rep)
            u, v = _cell_n4(rep, lo, alpha.lam)
        except ValueError as exc:
            return _density_report(
                cfg, counts, step - 1, marks, rational_flag,
                f"aborted at step {step}: {exc}",
            )
        counts[min(int(u * GRID), GRID - 1), min(int(v * GRID), GRID - 1)] += 1
        if step in checkpoints:
            marks.append({"samples": step, "discrepancy": _star_discrepancy(counts)})
            log.info("density: %d samples, discrepancy %.4f", step, marks[-1]["discrepancy"])
    return _density_report(cfg, counts, cfg.steps, marks, rational_flag, None)


# ---------------------------------------------------------------------------
# fiber multiplicity


def _max_cluster_1d(values, tol):
    v = np.sort(np.asarray(values, dtype=float))
    best = run = 1
    for gap in np.diff(v):
        run = run + 1 if gap < tol else 1
        best = max(best, run)
    return int(best)


def fiber_multiplicity_scan(cfg):
    """How many coordinate points share one value of the curve angles.

    On a fixed beta-level the angle of d_i (and of e_i) depends on
    gamma_i through a single cosine, so each value is attained at most
    twice per slot and at most 2^(n-3) times overall.  The scan
    evaluates the closed forms on a dense gamma grid (the twist orbit
    closure of one point at irrational beta), clusters the values, and
    spot-checks the closed form against the matrices.
    """
    if cfg.n == 4:
        return _fiber_scan_n4(cfg)
    if cfg.n == 5:
        return _fiber_scan_n5(cfg)
    raise ConfigError("n", "fiber scan is implemented for n in {4, 5}")


def _fiber_scan_n4(cfg):
    alpha = AngleVector(cfg.alpha)
    rng = np.random.default_rng(cfg.seed)
    coords0 = cfg.start_coords(rng)
    tol = cfg.tol("match_tol")
    m = cfg.steps
    k1, k2 = delta_parts(alpha, coords0, 1)
    grid = TAU * np.arange(m) / m
    delta = 2.0 * np.arccos(np.clip(np.cos(grid) * k1 + k2, -1.0, 1.0))
    max_cluster = _max_cluster_1d(delta, tol)
    evenness = float(np.abs(delta - delta[(-np.arange(m)) % m]).max())

    d1 = parse_label("d1", 4)
    worst = 0.0
    for j in sorted(int(x) for x in rng.integers(0, m, size=16)):
        coords = ActionAngleCoords(coords0.beta, {1: float(grid[j])})
        rep = chain_to_rep(build_chain(alpha, coords))
        worst = max(worst, abs(angle_function(rep, d1) - float(delta[j])))

    ok = max_cluster <= 2 and evenness <= 1e-8 and worst <= 1e-8
    return {
        "kind": "fiber",
        "n": 4,
        "samples": m,
        "beta": list(coords0.beta),
        "bound": 2,
        "max_cluster": max_cluster,
        "evenness_residual": evenness,
        "cross_check_residual": worst,
        "ok": bool(ok),
        "columns": ["index", "gamma", "delta"],
        "rows": [[int(j), float(grid[j]), float(delta[j])] for j in range(m)],
        "meta": _meta(cfg),
    }


def _fiber_scan_n5(cfg):
    alpha = AngleVector(cfg.alpha)
    rng = np.random.default_rng(cfg.seed)
    coords0 = cfg.start_coords(rng)
    tol = cfg.tol("match_tol")
    g = max(10, int(round(math.sqrt(cfg.steps))))
    grid = TAU * np.arange(g) / g

    def curve_values(parts, fold):
        k1, k2 = parts
        return 2.0 * np.arccos(np.clip(np.cos(fold - grid) * k1 + k2, -1.0, 1.0))

    delta1 = curve_values(delta_parts(alpha, coords0, 1), 0.0)
    delta2 = curve_values(delta_parts(alpha, coords0, 2), 0.0)
    eps1 = curve_values(epsilon_parts(alpha, coords0, 1), coords0.beta[0] / 2.0)

    # the grid is a product, so a (zeta_1, zeta_2) preimage is the product
    # of the per-slot preimages; check clusters per slot and per anchor
    patterns = {"delta,delta": (delta1, delta2), "epsilon,delta": (eps1, delta2)}
    bound = 4
    summary = {}
    ok = True
    anchors = rng.integers(0, g, size=(100, 2))
    for name, (z1, z2) in patterns.items():
        c1, c2 = _max_cluster_1d(z1, tol), _max_cluster_1d(z2, tol)
        pre = max(
            int((np.abs(z1 - z1[a]) < tol).sum() * (np.abs(z2 - z2[b]) < tol).sum())
            for a, b in anchors
        )
        summary[name] = {"max_cluster_product": c1 * c2, "max_preimage": pre}
        ok = ok and c1 * c2 <= bound and pre <= bound

    rows = [
        [i, j, float(grid[i]), float(grid[j]),
         float(delta1[i]), float(delta2[j]), float(eps1[i])]
        for i in range(g)
        for j in range(g)
    ]
    return {
        "kind": "fiber",
        "n": 5,
        "grid": g,
        "beta": list(coords0.beta),
        "bound": bound,
        "patterns": summary,
        "ok": bool(ok),
        "columns": ["i", "j", "gamma1", "gamma2", "delta1", "delta2", "epsilon1"],
        "rows": rows,
        "meta": _meta(cfg),
    }


# ---------------------------------------------------------------------------
# transversality


def transversality_sweep(cfg):
    """FD Jacobians of the angle functions along the generating flows.

    At regular points (every gamma off the zero loci) the all-delta
    pairing must be invertible; planting gamma_i on {0, pi} kills the
    beta_i row of that pairing, and swapping slot i to epsilon_i
    restores full rank.  For n = 4 the three scalar pairings are also
    swept around the whole gamma circle: at least one always survives.
    """
    alpha = AngleVector(cfg.alpha)
    n = alpha.n
    rng = np.random.default_rng(cfg.seed)
    det_tol, drop_tol = cfg.tol("det_tol"), cfg.tol("drop_tol")
    fams = standard_curves(n)
    b, d, e = fams["b"], fams["d"], fams["e"]
    all_delta = b + d

    def det_of(rep, curves):
        return abs(float(np.linalg.det(fd_jacobian(rep, curves, curves))))

    columns = ["kind", "slot"] + [f"gamma{i}" for i in range(1, n - 2)] + [
        "det_all_delta", "det_prescribed", "ok",
    ]
    rows = []
    min_regular = math.inf
    for _ in range(cfg.steps):
        coords = _regular_coords(alpha, rng)
        rep = chain_to_rep(build_chain(alpha, coords))
        det = det_of(rep, all_delta)
        min_regular = min(min_regular, det)
        gammas = [float(coords.gamma[i]) for i in range(1, n - 2)]
        rows.append(["regular", 0, *gammas, det, det, bool(det > det_tol)])

    max_drop = 0.0
    min_rescued = math.inf
    for i in range(1, n - 2):
        for locus in (0.0, math.pi):
            coords = _regular_coords(alpha, rng)
            planted = dict(coords.gamma)
            planted[i] = locus
            rep = chain_to_rep(build_chain(alpha, ActionAngleCoords(coords.beta, planted)))
            det0 = det_of(rep, all_delta)
            rescued = b + [e[i - 1] if j == i else d[j - 1] for j in range(1, n - 2)]
            det1 = det_of(rep, rescued)
            max_drop = max(max_drop, det0)
            min_rescued = min(min_rescued, det1)
            gammas = [float(planted[j]) for j in range(1, n - 2)]
            rows.append(
                ["planted", i, *gammas, det0, det1,
                 bool(det0 < drop_tol and det1 > det_tol)]
            )

    report = {
        "kind": "transversality",
        "n": n,
        "points": cfg.steps,
        "min_regular_det": min_regular,
        "max_planted_det": max_drop,
        "min_rescued_det": min_rescued,
        "regular_full_rank": bool(min_regular > det_tol),
        "planted_rank_drop": bool(max_drop < drop_tol),
        "rescue_full_rank": bool(min_rescued > det_tol),
        "columns": columns,
        "rows": rows,
        "meta": _meta(cfg),
    }
    report["ok"] = bool(
        report["regular_full_rank"]
        and report["planted_rank_drop"]
        and report["rescue_full_rank"]
    )

    if n == 4:
        triple_tol = cfg.tol("triple_tol")
        b1, d1, e1 = b[0], d[0], e[0]
        worst = math.inf
        samples = 48  # even count so the grid hits 0 and pi exactly
        beta = cfg.start_coords(rng).beta
        for gamma in TAU * np.arange(samples) / samples:
            rep = chain_to_rep(
                build_chain(alpha, ActionAngleCoords(beta, {1: float(gamma)}))
            )
            pairings = (
                poisson_fd(rep, b1, d1),
                poisson_fd(rep, b1, e1),
                poisson_fd(rep, d1, e1),
            )
            worst = min(worst, max(abs(p) for p in pairings))
        report["triple_min_best_pairing"] = worst
        report["triple_ok"] = bool(worst > triple_tol)
        report["ok"] = bool(report["ok"] and report["triple_ok"])
    return report


# ---------------------------------------------------------------------------
# gluing


def gluing_consistency(cfg):
    """Restriction to the sub-sphere commutes with twists supported there.

    Points are built with the trailing moment value exactly zero, so
    the last two peripherals merge into one elliptic of angle
    alpha_{n-1} + alpha_n - 2 pi.  Twists along b_i, d_i, e_i with
    i <= nbar - 3 must commute with restriction; the twist along the
    merged pair acts trivially on the restriction; lambda agrees.
    """
    alpha = AngleVector(cfg.alpha)
    n = alpha.n
    if n < 5:
        raise ConfigError("n", "gluing needs n >= 5")
    nbar = n - 1
    rng = np.random.default_rng(cfg.seed)
    quantum, ctol = cfg.tol("quantum"), cfg.tol("commutation_tol")

    a = alpha.alpha
    alpha_bar = AngleVector(a[: n - 2] + (a[n - 2] + a[n - 1] - 2.0 * math.pi,))
    lam_residual = abs(alpha_bar.lam - alpha.lam)

    fams = standard_curves(nbar)
    measured = fams["b"] + fams["d"] + fams["e"]
    inside = [c.label for f in "bde" for c in fams[f] if c.index <= nbar - 3]
    outside = pair_curve(nbar, n)

    def gap(x1, x2):
        return max(
            _angle_gap(angle_function(x1, c), angle_function(x2, c)) for c in measured
        )

    rows = []
    worst = worst_outside = 0.0
    fps_equal = outside_invariant = True
    for trial in range(cfg.steps):
        w = rng.random(n - 3) + 0.05
        mu = w / (2.0 * w.sum())
        beta = beta_from_mu(alpha, mu)
        gamma = {i: float(rng.uniform(0.0, TAU)) for i in range(1, n - 3)}
        rep = chain_to_rep(build_chain(alpha, ActionAngleCoords(beta, gamma)))
        rbar = restrict_rep(rep, nbar)
        for label in inside:
            x1 = restrict_rep(dehn_twist(rep, parse_label(label, n)), nbar)
            x2 = dehn_twist(rbar, parse_label(label, nbar))
            residual = gap(x1, x2)
            worst = max(worst, residual)
            fps_equal = fps_equal and (
                fingerprint(x1, quantum=quantum) == fingerprint(x2, quantum=quantum)
            )
            rows.append([trial, label, residual])
        y = restrict_rep(dehn_twist(rep, outside), nbar)
        residual = gap(y, rbar)
        worst_outside = max(worst_outside, residual)
        outside_invariant = outside_invariant and (
            fingerprint(y, quantum=quantum) == fingerprint(rbar, quantum=quantum)
        )
        rows.append([trial, outside.label, residual])

    ok = (
        worst <= ctol
        and worst_outside <= ctol
        and fps_equal
        and outside_invariant
        and lam_residual <= 1e-12
    )
    return {
        "kind": "glue",
        "n": n,
        "nbar": nbar,
        "trials": cfg.steps,
        "curves": inside,
        "max_commutation_residual": worst,
        "max_outside_residual": worst_outside,
        "fingerprints_equal": bool(fps_equal),
        "outside_twist_invariant": bool(outside_invariant),
        "lambda_residual": lam_residual,
        "ok": bool(ok),
        "columns": ["trial", "curve", "angle_residual"],
        "rows": rows,
        "meta": _meta(cfg),
    }
