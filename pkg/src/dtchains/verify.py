"""Self-check suite: every headline invariant, one measured residual each.

The rows feed the command-line ``verify`` table.  Sampling is seeded,
so the printed residuals are reproducible.
"""

import math
from dataclasses import dataclass

import numpy as np

from .chain import (
    ActionAngleCoords,
    AngleVector,
    build_chain,
    extract_coords,
    moment_map,
    validate_chain,
)
from .dynamics import (
    QUANTUM,
    bracket_closed_form,
    dehn_twist,
    flow,
    poisson_fd,
    rational_angle,
)
from .experiments import sample_interior_coords
from .hyperbolic import TAU
from .rep import (
    angle_function,
    chain_to_rep,
    delta_closed_form,
    epsilon_closed_form,
    fingerprint,
    rep_to_chain,
)
from .surface import pair_curve, standard_curves


@dataclass(frozen=True)
class VerifyRow:
    group: str
    name: str
    ok: bool
    residual: float


def _sample_alpha(rng, n, excess=0.8):
    s = rng.random(n)
    s *= excess / s.sum()
    return AngleVector(tuple(TAU * (1.0 - x) for x in s))


def _gap(x, y):
    d = abs(x - y) % TAU
    return min(d, TAU - d)


def _coords_gap(a, b):
    if set(a.gamma) != set(b.gamma) or len(a.beta) != len(b.beta):
        return math.inf
    worst = max(abs(x - y) for x, y in zip(a.beta, b.beta))
    for i, g in a.gamma.items():
        worst = max(worst, _gap(g, b.gamma[i]))
    return worst


def verify_suite(n=4, seed=0, quantum=QUANTUM):
    """Run every invariant group at the given puncture count."""
    rng = np.random.default_rng(seed)
    rows = []

    def check(group, name, residual, bound):
        rows.append(VerifyRow(group, name, bool(residual <= bound), float(residual)))

    # chain geometry ------------------------------------------------------
    worst_rt = worst_geom = worst_sum = 0.0
    for _ in range(25):
        alpha = _sample_alpha(rng, n)
        coords = sample_interior_coords(alpha, rng)
        chain = build_chain(alpha, coords)
        worst_rt = max(worst_rt, _coords_gap(coords, extract_coords(chain)))
        worst_geom = max(worst_geom, max(validate_chain(chain).values()))
        mv = moment_map(alpha, coords.beta)
        worst_sum = max(worst_sum, abs(sum(mv.mu) - 0.5))
    check("chain", "extract inverts build (sup over samples)", worst_rt, 1e-9)
    check("chain", "triangle geometry residuals", worst_geom, 1e-9)
    check("chain", "moment values sum to 1/2", worst_sum, 1e-12)
    alpha = _sample_alpha(rng, n)
    bad = list(sample_interior_coords(alpha, rng).beta)
    bad[0] = 4.0 * math.pi - alpha.alpha[0] - alpha.alpha[1] - 0.3  # mu_0 < 0
    try:
        build_chain(alpha, ActionAngleCoords(tuple(bad), {}))
        rejected = 1.0
    except ValueError:
        rejected = 0.0
    check("chain", "points outside the polytope rejected", rejected, 0.0)

    # representations ------------------------------------------------------
    worst_prod = worst_act = worst_area = worst_inv = worst_closed = 0.0
    for _ in range(15):
        alpha = _sample_alpha(rng, n)
        coords = sample_interior_coords(alpha, rng)
        chain = build_chain(alpha, coords)
        rep = chain_to_rep(chain)
        worst_prod = max(worst_prod, rep.product_residual())
        fams = standard_curves(n)
        mv = moment_map(alpha, coords.beta)
        for i in range(1, n - 2):
            worst_act = max(
                worst_act,
                _gap(angle_function(rep, fams["b"][i - 1]), coords.beta[i - 1]),
            )
            worst_closed = max(
                worst_closed,
                _gap(angle_function(rep, fams["d"][i - 1]), delta_closed_form(alpha, coords, i)),
                _gap(angle_function(rep, fams["e"][i - 1]), epsilon_closed_form(alpha, coords, i)),
            )
        for k, area in enumerate(chain.areas()):
            worst_area = max(worst_area, abs(area - mv.lam * mv.mu[k]))
        worst_inv = max(worst_inv, _coords_gap(coords, extract_coords(rep_to_chain(rep))))
    check("rep", "generator product is +/- identity", worst_prod, 1e-9)
    check("rep", "pants-curve angles equal the actions", worst_act, 1e-9)
    check("rep", "triangle areas equal lambda * mu", worst_area, 1e-9)
    check("rep", "matrices invert to the same coordinates", worst_inv, 1e-9)
    check("rep", "closed-form curve angles match matrices", worst_closed, 1e-9)

    # dynamics --------------------------------------------------------------
    goldman_fail = periodic_fail = 0
    worst_law = 0.0
    for _ in range(4):
        alpha = _sample_alpha(rng, n)
        coords = sample_interior_coords(alpha, rng)
        rep = chain_to_rep(build_chain(alpha, coords))
        fams = standard_curves(n)
        curves = fams["b"] + fams["d"] + fams["e"] + [pair_curve(1, n)]
        fp0 = fingerprint(rep, quantum=quantum)
        for c in curves:
            theta = angle_function(rep, c)
            twisted = fingerprint(dehn_twist(rep, c), quantum=quantum)
            flowed = fingerprint(flow(rep, c, theta / 2.0), quantum=quantum)
            goldman_fail += twisted != flowed
            periodic_fail += fingerprint(flow(rep, c, math.pi), quantum=quantum) != fp0
        after = extract_coords(rep_to_chain(dehn_twist(rep, fams["b"][0])))
        worst_law = max(worst_law, _gap(after.gamma[1], coords.gamma[1] + coords.beta[0]))
    check("dynamics", "Dehn twist equals the half-angle flow", float(goldman_fail), 0.0)
    check("dynamics", "flows return after time pi", float(periodic_fail), 0.0)
    check("dynamics", "twist law gamma_1 += beta_1", worst_law, 1e-9)

    alpha = _sample_alpha(rng, n)
    coords = sample_interior_coords(alpha, rng)
    rep = chain_to_rep(build_chain(alpha, coords))
    fams = standard_curves(n)
    b1, d1 = fams["b"][0], fams["d"][0]
    fd = poisson_fd(rep, b1, d1)
    check("dynamics", "FD bracket antisymmetry", abs(fd + poisson_fd(rep, d1, b1)), 1e-5)
    closed = bracket_closed_form(alpha, coords, 1, "delta")
    check("dynamics", "closed-form bracket matches FD", abs(fd - closed), 1e-5)

    planted = rational_angle(TAU * 3.0 / 7.0)
    golden = rational_angle(TAU / ((1.0 + math.sqrt(5.0)) / 2.0))
    rational_ok = planted.match == (3, 7) and golden.match is None
    check("dynamics", "rational rotation detection", 0.0 if rational_ok else 1.0, 0.0)
    return rows
