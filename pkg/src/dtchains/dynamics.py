"""Flows, twists, brackets, orbits.

The angle function of a curve generates a Hamiltonian flow that bends
the representation: generators on the inside of the curve are conjugated
by a rotation about the fixed point of the curve's image, by 2t, so the
flow is pi-periodic and the Dehn twist is the time theta/2 map.  In the
chain coordinates the b_i flow is the straight line gamma_i + 2t with
everything else frozen, which pins the rotation sense once and for all;
the Pair curves bend by -2t so that their twist agrees with the twist
along the d-curve on the other side of the same punctures.

Poisson brackets are measured by central finite differences of one angle
function along the flow of another, and checked against the closed forms
coming from the triangle geometry.
"""

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .chain import EPS_AREA, build_chain, extract_coords, moment_map
from .hyperbolic import IDENTITY, TAU, classify, rotation_about
from .rep import (
    Representation,
    angle_function,
    chain_to_rep,
    delta_closed_form,
    delta_parts,
    epsilon_closed_form,
    epsilon_parts,
    evaluate_word,
    fingerprint,
    rep_to_chain,
)
from .surface import CurveClass, pair_curve, twist_side

FD_H = 1e-5
QUANTUM = 1e-6
RECANON_EVERY = 100
Q_MAX = 10**4
RATIONAL_TOL = 1e-8
ORBIT_SIZE_CAP = 10**5


@dataclass(frozen=True)
class FlowSpec:
    """One leg of a composed flow: which curve, and for how long."""

    curve: CurveClass
    t: float


@dataclass(frozen=True)
class OrbitRecord:
    step: int
    word: tuple
    coords: object  # ActionAngleCoords, or None on an aborted step
    fingerprint: str


@dataclass(frozen=True)
class OrbitResult:
    verdict: str  # "finite" | "budget_exceeded" | "aborted"
    size: object  # int when finite, else None
    records: tuple
    diagnostic: str = ""


@dataclass(frozen=True)
class RationalAngleReport:
    angle: float
    match: object  # (p, q) or None
    q_max: int
    tol: float
    error: float


def _bend(rep, curve, conj):
    """Conjugate the generators inside the curve by `conj`.

    For the split e-side {1..i} u {i+2} the skipped generator c_{i+1}
    is conjugated by q = (conj c_{i+2} conj^{-1}) c_{i+2}^{-1}, which is
    exactly what keeps c_1 ... c_{i+2} (and hence the full relation)
    unchanged, because conj commutes with c_1 ... c_i c_{i+2}.
    """
    gens = list(rep.gens)
    ci = conj.inverse()
    if curve.family == "e":
        i = curve.index
        for k in range(i):
            gens[k] = conj * gens[k] * ci
        far = gens[i + 1]
        q = conj * far * ci * far.inverse()
        qi = q.inverse()
        gens[i] = q * gens[i] * qi
        gens[i + 1] = conj * far * ci
    else:
        inside, _ = twist_side(curve)
        for k in inside:
            gens[k - 1] = conj * gens[k - 1] * ci
    return Representation(rep.alpha, tuple(gens))


def _elliptic(rep, curve):
    cls = classify(evaluate_word(rep, curve.word))
    if cls.kind != "elliptic":
        raise ValueError(f"image of {curve.label} is {cls.kind}, cannot flow")
    return cls


def flow(rep, curve, t):
    """Time-t Hamiltonian flow of the curve's angle function."""
    cls = _elliptic(rep, curve)
    sense = -1.0 if curve.family == "p" else 1.0
    return _bend(rep, curve, rotation_about(cls.fixed_point, sense * 2.0 * t))


def dehn_twist(rep, curve, power=1):
    """The (power-th) Dehn twist along the curve.

    Same bending as flow at t = theta/2: the conjugator is the curve's
    image itself (its inverse for the Pair family), raised to `power`.
    """
    g = evaluate_word(rep, curve.word)
    if classify(g).kind != "elliptic":
        raise ValueError(f"image of {curve.label} is not elliptic, cannot twist")
    w = g.inverse() if (curve.family == "p") != (power < 0) else g
    conj = IDENTITY
    for _ in range(abs(power)):
        conj = conj * w
    return _bend(rep, curve, conj)


def local_parametrization(rep, flow_specs):
    """Compose flows in the given order (later specs applied last)."""
    out = rep
    for spec in flow_specs:
        out = flow(out, spec.curve, spec.t)
    return out


def undegenerate_twist(rep, iprime):
    """Reopen the collapsed triangle i'+2 by twisting along Pair(i'+2).

    Requires mu_{i'} = 0 and mu_{i'+1} != 0.  The twist leaves mu_j
    untouched for j outside {i', i'+1} and makes mu_{i'} nonzero, except
    for the exceptional angle relation beta_{i'+2} = alpha_{i'+3},
    beta_{i'} = 2pi - alpha_{i'+2}, where the zero moves up one slot.
    """
    n = rep.n
    if not 0 <= iprime <= n - 4:
        raise ValueError(f"iprime = {iprime} out of range 0..{n - 4}")
    coords = extract_coords(rep_to_chain(rep))
    mv = moment_map(rep.alpha, coords.beta)
    if mv.lam * mv.mu[iprime] >= EPS_AREA:
        raise ValueError(f"mu_{iprime} = {mv.mu[iprime]} does not vanish")
    if mv.lam * mv.mu[iprime + 1] < EPS_AREA:
        raise ValueError(f"mu_{iprime + 1} vanishes too; twist target is degenerate")
    return dehn_twist(rep, pair_curve(iprime + 2, n))


def _wrap(d):
    while d > math.pi:
        d -= TAU
    while d < -math.pi:
        d += TAU
    return d


def poisson_fd(rep, f_curve, g_curve, h=FD_H):
    """Central-difference bracket {theta_f, theta_g} at the representation."""
    tp = angle_function(flow(rep, g_curve, h), f_curve)
    tm = angle_function(flow(rep, g_curve, -h), f_curve)
    return _wrap(tp - tm) / (2.0 * h)


def bracket_closed_form(alpha, coords, i, which="delta"):
    """{beta_i, delta_i} or {beta_i, eps_i} from the triangle geometry.

    Derivative form of the cosine laws under gamma_i + 2t:
        {beta_i, delta_i} = -4 k1 sin(gamma_i) / sin(delta_i/2)
        {beta_i, eps_i}   = +4 k1' sin(beta_i/2 - gamma_i) / sin(eps_i/2)
    matching poisson_fd(rep, b_i, x) in this package's normalization
    (the measured rate dgamma_i(X_{b_i}) is 2; divide by it for the
    unit-rate convention).
    """
    if i not in coords.gamma:
        raise ValueError(f"gamma[{i}] undefined: point is on a degenerate stratum")
    if which == "delta":
        k1, _ = delta_parts(alpha, coords, i)
        half = delta_closed_form(alpha, coords, i) / 2.0
        num = -4.0 * k1 * math.sin(coords.gamma[i])
    elif which == "epsilon":
        k1, _ = epsilon_parts(alpha, coords, i)
        half = epsilon_closed_form(alpha, coords, i) / 2.0
        num = 4.0 * k1 * math.sin(coords.beta[i - 1] / 2.0 - coords.gamma[i])
    else:
        raise ValueError(f"which = {which!r}, expected 'delta' or 'epsilon'")
    s = math.sin(half)
    if abs(s) < 1e-12:
        raise ValueError(f"{which} angle at the branch point, bracket undefined")
    return num / s


def _locus_distance(x, targets):
    best = math.inf
    for t in targets:
        d = abs(x - t) % TAU
        best = min(best, d, TAU - d)
    return best


def poisson_zero_locus_check(alpha, coords, i, window=1e-4, bracket_tol=1e-3):
    """Where the two brackets vanish, against the predicted gamma loci.

    The delta bracket vanishes on gamma_i in {0, pi}; the epsilon
    bracket on gamma_i in {beta_i/2, beta_i/2 - pi}.  Bracket smallness
    is measured against the largest value the closed form can take on
    the fiber (scale = |4 k1 / sin(angle/2)|).
    """
    if i not in coords.gamma:
        raise ValueError(f"gamma[{i}] undefined: point is on a degenerate stratum")
    g = coords.gamma[i]
    b = coords.beta[i - 1]
    k1d, _ = delta_parts(alpha, coords, i)
    k1e, _ = epsilon_parts(alpha, coords, i)
    bd = bracket_closed_form(alpha, coords, i, "delta")
    be = bracket_closed_form(alpha, coords, i, "epsilon")
    sd = abs(4.0 * k1d / math.sin(delta_closed_form(alpha, coords, i) / 2.0))
    se = abs(4.0 * k1e / math.sin(epsilon_closed_form(alpha, coords, i) / 2.0))
    dist_d = _locus_distance(g, (0.0, math.pi))
    dist_e = _locus_distance(g, (b / 2.0, b / 2.0 - math.pi))
    small_d = abs(bd) < bracket_tol * sd
    small_e = abs(be) < bracket_tol * se
    in_d = dist_d < window
    in_e = dist_e < window
    return {
        "gamma": g,
        "beta": b,
        "bracket_delta": bd,
        "bracket_epsilon": be,
        "scale_delta": sd,
        "scale_epsilon": se,
        "dist_delta_locus": dist_d,
        "dist_epsilon_locus": dist_e,
        "delta_small": small_d,
        "epsilon_small": small_e,
        "in_delta_window": in_d,
        "in_epsilon_window": in_e,
        "delta_consistent": small_d == in_d,
        "epsilon_consistent": small_e == in_e,
        "simultaneously_small": small_d and small_e,
    }


def rational_angle(angle, q_max=Q_MAX, tol=RATIONAL_TOL):
    """Best rational approximation p/q of angle/(2 pi) with q <= q_max."""
    frac = Fraction(angle / TAU).limit_denominator(q_max)
    error = abs(angle - TAU * frac.numerator / frac.denominator)
    match = (frac.numerator, frac.denominator) if error <= tol else None
    return RationalAngleReport(angle, match, q_max, tol, error)


def _signed_label(curve, sign):
    return curve.label if sign > 0 else "-" + curve.label


def _loose_chain(rep):
    # twisting preserves the product and generator angles exactly, so the
    # strict drift gates would reject pure float noise on long orbits
    return rep_to_chain(rep, eps=math.inf, angle_tol=1e-2)


def _recanonicalize(rep):
    """Rebuild the representation from its extracted coordinates.

    Resets accumulated float drift exactly.  Near a degenerate stratum
    some gamma slots are undefined and a coordinate rebuild would pick an
    arbitrary attachment (a different point of the same fiber), so the
    repair is deferred until the orbit moves back off the stratum.
    """
    coords = extract_coords(_loose_chain(rep))
    if len(coords.gamma) < rep.n - 3:
        return rep
    return chain_to_rep(build_chain(rep.alpha, coords))


def _record(step, word, rep, quantum):
    coords = extract_coords(_loose_chain(rep))
    return OrbitRecord(step, word, coords, fingerprint(rep, quantum=quantum))


def orbit_explore(
    alpha,
    start,
    gens,
    max_steps=1000,
    strategy="walk",
    seed=0,
    quantum=QUANTUM,
    recanon_every=RECANON_EVERY,
):
    """Iterate twists along the given curves from a starting point.

    strategy "bfs" searches the twist group orbit at fingerprint
    resolution, applying every generator with both signs; the verdict is
    finite only if the search closes within both max_steps and the hard
    size cap.  strategy "walk" applies max_steps uniformly random signed
    generators (each record's word is that single step's letter),
    re-canonicalizing through the chain every `recanon_every` steps.
    An ellipticity failure aborts with a diagnostic record.
    """
    rep = chain_to_rep(build_chain(alpha, start))
    if strategy == "bfs":
        return _orbit_bfs(rep, gens, max_steps, quantum)
    if strategy == "walk":
        return _orbit_walk(rep, gens, max_steps, seed, quantum, recanon_every)
    raise ValueError(f"strategy = {strategy!r}, expected 'walk' or 'bfs'")


def _orbit_bfs(rep, gens, max_steps, quantum):
    cap = min(max_steps, ORBIT_SIZE_CAP)
    first = _record(0, (), rep, quantum)
    seen = {first.fingerprint}
    records = [first]
    queue = deque([(rep, ())])
    while queue:
        current, path = queue.popleft()
        for curve in gens:
            for sign in (1, -1):
                word = path + (_signed_label(curve, sign),)
                try:
                    nxt = dehn_twist(current, curve, power=sign)
                    fp = fingerprint(nxt, quantum=quantum)
                except ValueError as exc:
                    records.append(
                        OrbitRecord(len(records), word, None, "")
                    )
                    return OrbitResult("aborted", None, tuple(records), str(exc))
                if fp in seen:
                    continue
                if len(seen) >= cap:
                    return OrbitResult(
                        "budget_exceeded", None, tuple(records), "size cap hit"
                    )
                seen.add(fp)
                records.append(
                    OrbitRecord(
                        len(records), word, extract_coords(_loose_chain(nxt)), fp
                    )
                )
                queue.append((nxt, word))
    return OrbitResult("finite", len(seen), tuple(records), "")


def _orbit_walk(rep, gens, max_steps, seed, quantum, recanon_every):
    rng = np.random.default_rng(seed)
    records = [_record(0, (), rep, quantum)]
    for step in range(1, max_steps + 1):
        curve = gens[int(rng.integers(len(gens)))]
        sign = 1 if rng.random() < 0.5 else -1
        word = (_signed_label(curve, sign),)
        try:
            rep = dehn_twist(rep, curve, power=sign)
            if step % recanon_every == 0 or rep.product_residual() > 1e-8:
                rep = _recanonicalize(rep)
            records.append(_record(step, word, rep, quantum))
        except ValueError as exc:
            records.append(OrbitRecord(step, word, None, ""))
            return OrbitResult("aborted", None, tuple(records), str(exc))
    return OrbitResult("budget_exceeded", None, tuple(records), "")


def fd_jacobian(rep, measure_curves, flow_curves, h=FD_H):
    """Matrix of central differences d theta_measure / d t_flow."""
    out = np.zeros((len(measure_curves), len(flow_curves)))
    for j, fc in enumerate(flow_curves):
        plus = flow(rep, fc, h)
        minus = flow(rep, fc, -h)
        for i, mc in enumerate(measure_curves):
            out[i, j] = _wrap(
                angle_function(plus, mc) - angle_function(minus, mc)
            ) / (2.0 * h)
    return out
