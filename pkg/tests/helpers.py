"""Shared samplers for valid coordinates, used across the test modules."""

import math

from dtchains.chain import ActionAngleCoords, AngleVector, moment_map

TAU = 2.0 * math.pi


def sample_alpha(rng, n, excess=0.8):
    """Peripheral angles with angle excess lam = 2*pi*(1 - excess_sum).

    Each alpha_i = 2*pi*(1 - s_i) with the s_i scaled so they sum to
    `excess`, keeping every angle inside (0, 2*pi) and lam > 0.
    """
    raw = rng.uniform(0.2, 1.0, size=n)
    s = excess * raw / raw.sum()
    return AngleVector(tuple(TAU * (1.0 - si) for si in s))


def beta_from_mu(alpha, mu):
    """Invert the moment map on the beta coordinates."""
    a = alpha.alpha
    lam = alpha.lam
    beta = [2.0 * TAU - a[0] - a[1] + 2.0 * lam * mu[0]]
    for i in range(1, alpha.n - 3):
        beta.append(beta[-1] + TAU - a[i + 1] + 2.0 * lam * mu[i])
    return tuple(beta)


def sample_mu(rng, n, floor=0.05):
    """A point of the open moment simplex {mu > 0, sum = 1/2}."""
    w = rng.uniform(floor, 1.0, size=n - 2)
    return tuple(w / (2.0 * w.sum()))


def sample_coords(rng, alpha, mu=None):
    """Random regular action-angle coordinates for the given alpha."""
    if mu is None:
        mu = sample_mu(rng, alpha.n)
    beta = beta_from_mu(alpha, mu)
    gamma = {i: rng.uniform(0.0, TAU) for i in range(1, alpha.n - 2)}
    coords = ActionAngleCoords(beta, gamma)
    mv = moment_map(alpha, beta)
    assert min(mv.mu) > -1e-15, (alpha, mu, mv.mu)
    return coords


def coords_close(c1, c2, tol=1e-9):
    """Sup distance between coordinate tuples, angles compared mod 2*pi."""
    if len(c1.beta) != len(c2.beta) or set(c1.gamma) != set(c2.gamma):
        return math.inf
    err = max(abs(b1 - b2) for b1, b2 in zip(c1.beta, c2.beta))
    for i, g in c1.gamma.items():
        d = abs(g - c2.gamma[i]) % TAU
        err = max(err, min(d, TAU - d))
    return err
